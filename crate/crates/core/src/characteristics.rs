//! Characteristic evolution of the conservation law: straight-line
//! advection x(t) = x₀ + t·f′(u₀(x₀)), the Jacobian of the characteristic
//! map (exact rank-one form and a finite-difference route), breaking times
//! 1/K(s), focusing points, the two-route trajectory-separation identity,
//! the pre-breaking solution evaluator, and explicit Rankine–Hugoniot
//! front propagation after formation.

use alloc::vec;
use alloc::vec::Vec;

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::flux::FluxModel;
use crate::linalg;
use crate::math;
use crate::newton;
use crate::profile::ProfileBundle;

/// x₀ + t·f′(u₀): u is constant along characteristics, so advection is a
/// closed form.
pub fn advect(flux: &FluxModel, x0: &[f64], u0: f64, t: f64) -> Vec<f64> {
    let n = flux.dim();
    debug_assert_eq!(x0.len(), n);
    let mut v = vec![0.0; n];
    flux.fill(u0, 1, &mut v);
    let mut x = x0.to_vec();
    for i in 0..n {
        x[i] += t * v[i];
    }
    x
}

/// Jacobian of the characteristic map x₀ ↦ x(x₀, t) at x₀, two routes:
///
/// * `lemma`: 1 + t·Σᵢ fᵢ″(u₀(x₀))·∂u₀/∂x₀ᵢ — the exact rank-one-update
///   determinant (the unit term makes J(0) = 1 for the identity map and
///   J = 0 exactly at t = 1/K on bundle data);
/// * `fd`: determinant of the difference-quotient matrix of the map.
///
/// Both use centered differences at step h on the initial field; the
/// stencil must not straddle a region seam.
pub fn jacobian(
    flux: &FluxModel,
    field: &dyn Field,
    x0: &[f64],
    t: f64,
    h: f64,
) -> Result<(f64, f64)> {
    let n = flux.dim();
    let base_region = field.region_id(x0);
    let check_region = |x: &[f64]| -> Result<()> {
        if field.region_id(x) != base_region {
            Err(Error::SeamStraddle)
        } else {
            Ok(())
        }
    };

    let u0 = field.eval(x0)?;
    let mut du0 = vec![0.0; n];
    let mut xp = x0.to_vec();
    for i in 0..n {
        xp[i] = x0[i] + h;
        check_region(&xp)?;
        let up = field.eval(&xp)?;
        xp[i] = x0[i] - h;
        check_region(&xp)?;
        let um = field.eval(&xp)?;
        xp[i] = x0[i];
        du0[i] = (up - um) / (2.0 * h);
    }
    let mut f2 = vec![0.0; n];
    flux.fill(u0, 2, &mut f2);
    let lemma = 1.0 + t * linalg::dot(&f2, &du0);

    // columns of ∂x/∂x₀ by differencing the full map (u₀ varies with x₀)
    let mut jac = vec![0.0; n * n];
    for col in 0..n {
        xp[col] = x0[col] + h;
        let up = field.eval(&xp)?;
        let ahead = advect(flux, &xp, up, t);
        xp[col] = x0[col] - h;
        let um = field.eval(&xp)?;
        let behind = advect(flux, &xp, um, t);
        xp[col] = x0[col];
        for row in 0..n {
            jac[row * n + col] = (ahead[row] - behind[row]) / (2.0 * h);
        }
    }
    let fd = linalg::det(&jac, n);
    Ok((lemma, fd))
}

/// Breaking time of the s-trajectory: t₀(s) = 1/K(s).
pub fn breaking_time(bundle: &ProfileBundle, s: &[f64]) -> Result<f64> {
    Ok(1.0 / bundle.trajectory(s)?.k)
}

/// Focusing point x*(s) = χ(s) + f′(u_start)/K(s): all characteristics
/// launched from the s-trajectory meet there at t₀(s), independent of τ.
pub fn focus_point(bundle: &ProfileBundle, s: &[f64]) -> Result<Vec<f64>> {
    let traj = bundle.trajectory(s)?;
    let fp = bundle.flux().eval(bundle.u_start(), 1)?;
    Ok(linalg::add_scaled(&traj.start, 1.0 / traj.k, &fp))
}

/// Separation of the two boundary characteristics of the s-trajectory at
/// time t, measured (two advections) and by the closed form
/// (1/K)[f′(U) − f′(u₀⁰)](Kt − 1).
pub fn separation(bundle: &ProfileBundle, s: &[f64], t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let traj = bundle.trajectory(s)?;
    let endpoint = bundle.point_on_trajectory(&traj, traj.tau0).0;
    // original Γ₁/Γ₂ anchors regardless of internal relabeling
    let (p1, p2) = if bundle.relabeled() {
        (endpoint, traj.start.clone())
    } else {
        (traj.start.clone(), endpoint)
    };
    let a1 = advect(bundle.flux(), &p1, bundle.u_gamma1(), t);
    let a2 = advect(bundle.flux(), &p2, bundle.u_gamma2(), t);
    let measured = linalg::sub(&a1, &a2);
    let dp = linalg::sub(
        &bundle.flux().eval(bundle.u_gamma1(), 1)?,
        &bundle.flux().eval(bundle.u_gamma2(), 1)?,
    );
    let formula = linalg::scale(&dp, (traj.k * t - 1.0) / traj.k);
    Ok((measured, formula))
}

/// A discretized front: ordered points with unit normals oriented from
/// the `u_behind` side toward the `u_ahead` side.
#[derive(Debug, Clone)]
pub struct FrontPolyline {
    pub points: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
    pub u_behind: f64,
    pub u_ahead: f64,
    pub time: f64,
}

impl FrontPolyline {
    /// Build from ordered points; normals come from adjacent segments and
    /// are flipped, where `orient_along` is given, to point its way.
    pub fn new(
        points: Vec<Vec<f64>>,
        u_behind: f64,
        u_ahead: f64,
        time: f64,
        orient_along: Option<&[f64]>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DegenerateFront);
        }
        let dim = points[0].len();
        if dim > 1 && points.len() < 2 {
            return Err(Error::DegenerateFront);
        }
        if points
            .windows(2)
            .any(|w| linalg::dist(&w[0], &w[1]) == 0.0)
        {
            return Err(Error::DegenerateFront);
        }
        let normals = polyline_normals(&points, orient_along)?;
        Ok(Self {
            points,
            normals,
            u_behind,
            u_ahead,
            time,
        })
    }

    /// The focus envelope {x*(s)} over the bundle's s-grid, stamped at the
    /// latest breaking time max_s t₀(s): the earliest instant the whole
    /// band has overturned into a single front. The larger state is always
    /// behind the front (the motion runs from it), whatever Γ carries it.
    pub fn focus_envelope(bundle: &ProfileBundle) -> Result<Self> {
        let mut points = Vec::with_capacity(bundle.s_samples().len());
        for s in bundle.s_samples() {
            points.push(focus_point(bundle, s)?);
        }
        let t_form = bundle
            .k_table()
            .iter()
            .map(|k| 1.0 / k)
            .fold(f64::NEG_INFINITY, f64::max);
        Self::new(
            points,
            bundle.u_start(),
            bundle.u_end(),
            t_form,
            Some(bundle.direction()),
        )
    }

    pub fn min_segment_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| linalg::dist(&w[0], &w[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn polyline_normals(points: &[Vec<f64>], orient_along: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
    let dim = points[0].len();
    let mut normals = Vec::with_capacity(points.len());
    match dim {
        1 => {
            let sign = match orient_along {
                Some(d) if d[0] < 0.0 => -1.0,
                _ => 1.0,
            };
            for _ in points {
                normals.push(vec![sign]);
            }
        }
        2 => {
            for i in 0..points.len() {
                let (a, b) = if points.len() == 1 {
                    return Err(Error::DegenerateFront);
                } else if i == 0 {
                    (&points[0], &points[1])
                } else if i == points.len() - 1 {
                    (&points[i - 1], &points[i])
                } else {
                    (&points[i - 1], &points[i + 1])
                };
                let mut n = vec![b[1] - a[1], -(b[0] - a[0])];
                if linalg::normalize(&mut n) == 0.0 {
                    return Err(Error::DegenerateFront);
                }
                if let Some(d) = orient_along {
                    if linalg::dot(&n, d) < 0.0 {
                        n[0] = -n[0];
                        n[1] = -n[1];
                    }
                }
                normals.push(n);
            }
        }
        _ => {
            return Err(Error::InvalidInput(
                "front polylines are supported in dimensions 1 and 2".into(),
            ))
        }
    }
    Ok(normals)
}

/// Rankine–Hugoniot normal speed at a unit normal n:
/// σ = ⟨F(u₋) − F(u₊), n⟩ / (u₋ − u₊) with the componentwise flux vector F.
pub fn rankine_hugoniot_speed(flux: &FluxModel, u_behind: f64, u_ahead: f64, n: &[f64]) -> f64 {
    let dim = flux.dim();
    let mut df = vec![0.0; dim];
    for i in 0..dim {
        df[i] = flux.component(i, u_behind, 0) - flux.component(i, u_ahead, 0);
    }
    linalg::dot(&df, n) / (u_behind - u_ahead)
}

/// Explicit front propagation: every point moves with v = σ·n, normals
/// recomputed from the polyline each step, dt capped by the safety bound
/// 0.25·(min segment length)/max|σ| and truncated to land on t_target.
pub fn propagate_front(
    front: &FrontPolyline,
    flux: &FluxModel,
    t_target: f64,
    dt: f64,
) -> Result<FrontPolyline> {
    if front.time > t_target + 1e-12 * (1.0 + math::abs(t_target)) {
        return Err(Error::InvalidInput(
            "front time stamp is already past the target time".into(),
        ));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("front step must be positive".into()));
    }
    let orient = front.normals[0].clone();
    let mut current = front.clone();
    let mut t = current.time;
    while t < t_target - 1e-15 * (1.0 + t_target) {
        let sigmas: Vec<f64> = current
            .normals
            .iter()
            .map(|n| rankine_hugoniot_speed(flux, current.u_behind, current.u_ahead, n))
            .collect();
        let max_sigma = sigmas.iter().fold(0.0f64, |a, s| a.max(math::abs(*s)));
        let mut step = dt.min(t_target - t);
        if current.points.len() > 1 && max_sigma > 0.0 {
            step = step.min(defaults::FRONT_DT_SAFETY * current.min_segment_length() / max_sigma);
        }
        for (p, (n, sigma)) in current
            .points
            .iter_mut()
            .zip(current.normals.iter().zip(&sigmas))
        {
            for i in 0..p.len() {
                p[i] += step * sigma * n[i];
            }
        }
        t += step;
        current.normals = polyline_normals(&current.points, Some(&orient))?;
    }
    current.time = t_target;
    Ok(current)
}

/// Pre-breaking solution of the formation problem at a fixed time
/// t < min_s t₀(s): u(x, t) is found by inverting the advected bundle map
/// (s, τ) ↦ X(τ, s) + t·f′(u₁(τ, s)), with the fixed-point equation
/// u = u₀(x − t·f′(u)) as a bisection fallback.
pub struct CharSolution<'a> {
    bundle: &'a ProfileBundle,
    t: f64,
    /// inversion seed cloud advected to time t
    seeds: Vec<(Vec<f64>, f64, Vec<f64>)>,
    s_half: Vec<f64>,
}

impl<'a> CharSolution<'a> {
    pub fn new(bundle: &'a ProfileBundle, t: f64) -> Result<Self> {
        let t_break = bundle
            .k_table()
            .iter()
            .map(|k| 1.0 / k)
            .fold(f64::INFINITY, f64::min);
        if t < 0.0 || t >= t_break * (1.0 - 1e-12) {
            return Err(Error::BeyondBreaking { t, t_break });
        }
        let mut seeds = Vec::new();
        for s in bundle.s_samples() {
            let traj = bundle.trajectory(s)?;
            let nt = defaults::SEED_TAU_SAMPLES;
            for j in 0..nt {
                let tau = traj.tau0 * j as f64 / (nt - 1) as f64;
                let (x, u) = bundle.point_on_trajectory(&traj, tau);
                seeds.push((s.clone(), tau, advect(bundle.flux(), &x, u, t)));
            }
        }
        let pd = bundle.start_surface().param_dim();
        let s_half: Vec<f64> = bundle
            .start_surface()
            .param_box()
            .iter()
            .map(|(lo, hi)| 0.05 * (hi - lo).max(1.0))
            .collect();
        debug_assert_eq!(s_half.len(), pd);
        Ok(Self {
            bundle,
            t,
            seeds,
            s_half,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    fn eval_by_inversion(&self, x: &[f64]) -> Option<f64> {
        let b = self.bundle;
        let n = b.flux().dim();
        let pd = b.start_surface().param_dim();
        let mut cached: Option<crate::profile::Trajectory> = None;
        let mut residual = |z: &[f64], out: &mut [f64]| -> bool {
            let (s, tau) = z.split_at(pd);
            if !matches!(&cached, Some(tr) if tr.s.as_slice() == s) {
                match b.trajectory(s) {
                    Ok(tr) => cached = Some(tr),
                    Err(_) => return false,
                }
            }
            let traj = cached.as_ref().unwrap();
            let (x0, u) = b.point_on_trajectory(traj, tau[0]);
            let xt = advect(b.flux(), &x0, u, self.t);
            for i in 0..n {
                out[i] = xt[i] - x[i];
            }
            true
        };

        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, (_, _, sx)) in self.seeds.iter().enumerate() {
            let d = linalg::dist(sx, x);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        let (s0, tau0, _) = &self.seeds[best];
        let base: Vec<f64> = s0.iter().cloned().chain(core::iter::once(*tau0)).collect();
        let mut seeds = vec![base.clone()];
        if pd > 0 {
            for sign in [1.0, -1.0] {
                let mut p = base.clone();
                p[0] += sign * self.s_half[0];
                seeds.push(p);
            }
        }
        for sign in [1.0, -1.0] {
            let mut p = base.clone();
            p[pd] += sign * 0.1;
            seeds.push(p);
        }
        seeds.truncate(defaults::NEWTON_SEEDS);
        let (root, _) =
            newton::multi_start(&mut residual, &seeds, &newton::NewtonOptions::default());
        let z = root?;
        let (s, tau) = z.split_at(pd);
        let traj = b.trajectory(s).ok()?;
        let slack = 1e-12 * (1.0 + traj.tau0);
        Some(if tau[0] < -slack {
            if b.relabeled() {
                b.u_gamma2()
            } else {
                b.u_gamma1()
            }
        } else if tau[0] > traj.tau0 + slack {
            if b.relabeled() {
                b.u_gamma1()
            } else {
                b.u_gamma2()
            }
        } else {
            b.u_start() - traj.k * tau[0]
        })
    }

    fn eval_by_fixed_point(&self, x: &[f64]) -> Result<f64> {
        let b = self.bundle;
        let field = crate::initial::PiecewiseField::new(b);
        let phi = |u: f64| -> Result<f64> {
            let y = linalg::add_scaled(
                x,
                -self.t,
                &{
                    let mut v = vec![0.0; b.flux().dim()];
                    b.flux().fill(u, 1, &mut v);
                    v
                },
            );
            Ok(u - field.eval(&y)?)
        };
        let (mut lo, mut hi) = (b.u_end(), b.u_start());
        let flo = phi(lo)?;
        let fhi = phi(hi)?;
        if math::abs(flo) <= 1e-12 {
            return Ok(lo);
        }
        if math::abs(fhi) <= 1e-12 {
            return Ok(hi);
        }
        if flo.signum() == fhi.signum() {
            return Err(Error::NonConvergence {
                what: "characteristic fixed point",
                residual: flo.min(fhi),
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = phi(mid)?;
            if math::abs(fm) <= 1e-13 || hi - lo < 1e-15 {
                return Ok(mid);
            }
            if fm.signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

impl Field for CharSolution<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        match self.eval_by_inversion(x) {
            Some(u) => Ok(u),
            None => self.eval_by_fixed_point(x),
        }
    }
}
