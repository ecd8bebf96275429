//! The overturning profile u₁(x): a bundle of straight trajectories
//! launched from Γ₁ (value U) along the fixed direction d = f′(U) − f′(u₀⁰),
//! each reaching Γ₂ (value u₀⁰) after parameter span τ₀(s), with the
//! per-trajectory constant K(s) = (U − u₀⁰)/τ₀(s).
//!
//! The trajectory system
//!
//!   dXᵢ/dτ = fᵢ″(u₁),   u₁(0) = U on Γ₁,
//!   du₁/dτ = −K,
//!
//! integrates in closed form to
//!
//!   Xᵢ(τ, s) = χ¹ᵢ(s) + (1/K)(fᵢ′(U) − fᵢ′(U − Kτ)),   u₁ = U − K(s)τ,
//!
//! so the Γ₂ endpoint lies on the straight ray from χ¹(s) along d at
//! λ = 1/K. That turns the boundary-value problem into one ray–surface
//! root find per s: K(s) is obtained geometrically, never by shooting.
//!
//! Between tabulated samples K(s) is recomputed by the ray solve, not
//! interpolated. The convention U > u₀⁰ is kept internally: a scenario
//! with U < u₀⁰ is relabeled (the bundle anchors at Γ₂, which carries the
//! larger state) and the relabeling is surfaced for the run report.

use alloc::vec;
use alloc::vec::Vec;

use crate::defaults;
use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::geometry::{self, Ray, Surface};
use crate::linalg;
use crate::math;
use crate::newton;

/// Evaluation route for a bundle point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMethod {
    /// The integrated closed form (production path).
    ClosedForm,
    /// Classical 4-stage Runge–Kutta on the trajectory system at step
    /// τ₀/1024 (cross-check path).
    Ode,
}

/// One solved trajectory: launch point, chord constant, and span.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub start: Vec<f64>,
    pub k: f64,
    pub tau0: f64,
}

/// Bundle coordinates of an inverted point (τ anchored at the start
/// surface, which is Γ₂ when the bundle is relabeled).
#[derive(Debug, Clone)]
pub struct BundleCoords {
    pub s: Vec<f64>,
    pub tau: f64,
    pub k: f64,
    pub tau0: f64,
}

/// Where a point landed relative to the bundle band.
#[derive(Debug, Clone)]
pub enum BundleLocation {
    /// 0 ≤ τ ≤ τ₀(s): inside Ω⁰.
    Interior(BundleCoords),
    /// τ < 0: the side of Γ₁ entered by trajectories running backwards.
    BeforeGamma1(BundleCoords),
    /// τ > τ₀(s): past Γ₂.
    AfterGamma2(BundleCoords),
    /// No Newton start converged.
    Outside,
}

/// Inversion outcome; `ambiguous` reports multi-start disagreement
/// (non-injective bundle map on the probed window).
#[derive(Debug, Clone)]
pub struct Inversion {
    pub location: BundleLocation,
    pub ambiguous: bool,
}

/// The solved profile problem.
#[derive(Debug, Clone)]
pub struct ProfileBundle {
    flux: FluxModel,
    gamma1: Surface,
    gamma2: Surface,
    u_gamma1: f64,
    u_gamma2: f64,
    relabeled: bool,
    /// f′(u_start) − f′(u_end); constant in s.
    d: Vec<f64>,
    lambda_max: f64,
    s_samples: Vec<Vec<f64>>,
    k_table: Vec<f64>,
    tau0_table: Vec<f64>,
    endpoints: Vec<Vec<f64>>,
    /// (s, τ, x) cloud seeding Newton inversions.
    seeds: Vec<(Vec<f64>, f64, Vec<f64>)>,
    s_step_half: Vec<f64>,
}

impl ProfileBundle {
    /// Solve the profile problem on a uniform s-grid (`s_per_axis` points
    /// per parameter axis of Γ₁'s domain box).
    pub fn build(
        flux: FluxModel,
        gamma1: Surface,
        gamma2: Surface,
        u_gamma1: f64,
        u_gamma2: f64,
        s_per_axis: usize,
    ) -> Result<Self> {
        let n = flux.dim();
        if gamma1.ambient_dim() != n || gamma2.ambient_dim() != n {
            return Err(Error::InvalidInput(
                "flux and surface dimensions disagree".into(),
            ));
        }
        if u_gamma1 == u_gamma2 {
            return Err(Error::InvalidInput(
                "boundary states are equal; the profile needs U != u00".into(),
            ));
        }
        let relabeled = u_gamma1 < u_gamma2;
        let (u_start, u_end) = if relabeled {
            (u_gamma2, u_gamma1)
        } else {
            (u_gamma1, u_gamma2)
        };
        let (ok, min_norm) = flux.check_nondegenerate(u_end, u_start, 64)?;
        if !ok {
            return Err(Error::DegenerateFlux { min_norm });
        }
        geometry::surfaces_disjoint(&gamma1, &gamma2, 17)?;

        let d = linalg::sub(&flux.eval(u_start, 1)?, &flux.eval(u_end, 1)?);
        let start_surface = if relabeled { &gamma2 } else { &gamma1 };
        let end_surface = if relabeled { &gamma1 } else { &gamma2 };

        let s_samples = start_surface.sample_params(s_per_axis);
        let center = start_surface.point_extended(&mid_params(start_surface.param_box()))?;
        let lambda_max = geometry::default_lambda_max(end_surface, &center);

        let mut bundle = Self {
            flux,
            gamma1,
            gamma2,
            u_gamma1,
            u_gamma2,
            relabeled,
            d,
            lambda_max,
            s_samples,
            k_table: Vec::new(),
            tau0_table: Vec::new(),
            endpoints: Vec::new(),
            seeds: Vec::new(),
            s_step_half: Vec::new(),
        };

        let samples = core::mem::take(&mut bundle.s_samples);
        for s in &samples {
            let traj = bundle.trajectory(s)?;
            let endpoint = bundle.point_on_trajectory(&traj, traj.tau0).0;
            let g_end = bundle.end_surface().implicit(&endpoint);
            if math::abs(g_end) > defaults::BUNDLE_ENDPOINT_TOL {
                return Err(Error::InvalidInput(alloc::format!(
                    "trajectory endpoint misses the target surface: |g| = {} at s = {s:?}",
                    math::abs(g_end)
                )));
            }
            debug_assert!(
                math::abs(traj.k * traj.tau0 - (u_start - u_end)) <= defaults::BUNDLE_IDENTITY_TOL
            );
            bundle.k_table.push(traj.k);
            bundle.tau0_table.push(traj.tau0);
            bundle.endpoints.push(endpoint);

            let nt = defaults::SEED_TAU_SAMPLES;
            for j in 0..nt {
                let tau = traj.tau0 * j as f64 / (nt - 1) as f64;
                let (x, _) = bundle.point_on_trajectory(&traj, tau);
                bundle.seeds.push((s.clone(), tau, x));
            }
        }
        bundle.s_samples = samples;

        bundle.s_step_half = bundle
            .start_surface()
            .param_box()
            .iter()
            .map(|(lo, hi)| {
                if s_per_axis > 1 {
                    0.5 * (hi - lo) / (s_per_axis - 1) as f64
                } else {
                    0.5 * (hi - lo).max(1.0)
                }
            })
            .collect();
        Ok(bundle)
    }

    pub fn flux(&self) -> &FluxModel {
        &self.flux
    }

    pub fn gamma1(&self) -> &Surface {
        &self.gamma1
    }

    pub fn gamma2(&self) -> &Surface {
        &self.gamma2
    }

    /// Boundary value on Γ₁ (the state U).
    pub fn u_gamma1(&self) -> f64 {
        self.u_gamma1
    }

    /// Boundary value on Γ₂ (the state u₀⁰).
    pub fn u_gamma2(&self) -> f64 {
        self.u_gamma2
    }

    /// True when the bundle is anchored at Γ₂ because U < u₀⁰.
    pub fn relabeled(&self) -> bool {
        self.relabeled
    }

    /// Surface the trajectories launch from (Γ₁ unless relabeled).
    pub fn start_surface(&self) -> &Surface {
        if self.relabeled {
            &self.gamma2
        } else {
            &self.gamma1
        }
    }

    /// Surface the trajectories land on.
    pub fn end_surface(&self) -> &Surface {
        if self.relabeled {
            &self.gamma1
        } else {
            &self.gamma2
        }
    }

    /// State carried at the launch surface (always the larger one).
    pub fn u_start(&self) -> f64 {
        self.u_gamma1.max(self.u_gamma2)
    }

    pub fn u_end(&self) -> f64 {
        self.u_gamma1.min(self.u_gamma2)
    }

    /// f′(u_start) − f′(u_end), the common trajectory direction.
    pub fn direction(&self) -> &[f64] {
        &self.d
    }

    pub fn s_samples(&self) -> &[Vec<f64>] {
        &self.s_samples
    }

    pub fn k_table(&self) -> &[f64] {
        &self.k_table
    }

    pub fn tau0_table(&self) -> &[f64] {
        &self.tau0_table
    }

    /// Tabulated trajectory endpoints X(τ₀(s), s) on the end surface.
    pub fn endpoints(&self) -> &[Vec<f64>] {
        &self.endpoints
    }

    /// Solve one trajectory at an arbitrary parameter (ray solve, exact —
    /// no interpolation between tabulated samples).
    pub fn trajectory(&self, s: &[f64]) -> Result<Trajectory> {
        let start = self.start_surface().point_extended(s)?;
        let ray = Ray::new(start.clone(), self.d.clone())?;
        let lam = geometry::ray_intersect(self.end_surface(), &ray, self.lambda_max)?
            .ok_or_else(|| Error::RayMiss { s: s.to_vec() })?;
        let k = 1.0 / lam;
        if !(k > 0.0) {
            return Err(Error::NonPositiveK { k });
        }
        let tau0 = (self.u_start() - self.u_end()) * lam;
        Ok(Trajectory {
            s: s.to_vec(),
            start,
            k,
            tau0,
        })
    }

    /// Closed-form point on a solved trajectory (τ unrestricted: the
    /// closed form continues analytically beyond [0, τ₀]).
    pub fn point_on_trajectory(&self, traj: &Trajectory, tau: f64) -> (Vec<f64>, f64) {
        let n = self.flux.dim();
        let u = self.u_start() - traj.k * tau;
        let mut fp_start = vec![0.0; n];
        let mut fp_u = vec![0.0; n];
        self.flux.fill(self.u_start(), 1, &mut fp_start);
        self.flux.fill(u, 1, &mut fp_u);
        let mut x = traj.start.clone();
        for i in 0..n {
            x[i] += (fp_start[i] - fp_u[i]) / traj.k;
        }
        (x, u)
    }

    /// (x, u₁) at trajectory coordinates (s, τ), τ ∈ [0, τ₀(s)].
    pub fn point(&self, s: &[f64], tau: f64, method: PointMethod) -> Result<(Vec<f64>, f64)> {
        let traj = self.trajectory(s)?;
        let slack = 1e-12 * (1.0 + traj.tau0);
        if tau < -slack || tau > traj.tau0 + slack {
            return Err(Error::TauOutsideRange {
                tau,
                tau0: traj.tau0,
            });
        }
        match method {
            PointMethod::ClosedForm => Ok(self.point_on_trajectory(&traj, tau)),
            PointMethod::Ode => Ok(self.point_rk4(&traj, tau)),
        }
    }

    /// RK4 on dX/dτ = f″(u), du/dτ = −K from the launch point.
    fn point_rk4(&self, traj: &Trajectory, tau: f64) -> (Vec<f64>, f64) {
        let n = self.flux.dim();
        let h_full = traj.tau0 / defaults::RK4_STEPS as f64;
        let mut x = traj.start.clone();
        let mut u = self.u_start();
        let mut remaining = tau;
        let mut buf = vec![0.0; n];
        while remaining > 0.0 {
            let h = h_full.min(remaining);
            // du/dτ = −K is linear, so u at stage offsets is exact.
            let u_mid = u - traj.k * 0.5 * h;
            let u_endp = u - traj.k * h;
            for i in 0..n {
                let k1 = self.flux.component(i, u, 2);
                let k2 = self.flux.component(i, u_mid, 2);
                let k3 = k2;
                let k4 = self.flux.component(i, u_endp, 2);
                buf[i] = h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            for i in 0..n {
                x[i] += buf[i];
            }
            u = u_endp;
            remaining -= h;
        }
        (x, u)
    }

    /// Deterministic seed list for a Newton inversion targeting x.
    fn inversion_seeds(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let pd = self.start_surface().param_dim();
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
        let dtau = {
            let idx = self
                .s_samples
                .iter()
                .position(|s| s == s0)
                .unwrap_or(0);
            0.5 * self.tau0_table[idx] / (defaults::SEED_TAU_SAMPLES - 1) as f64
        };
        let base: Vec<f64> = s0.iter().cloned().chain(core::iter::once(*tau0)).collect();
        let mut seeds = vec![base.clone()];
        if pd > 0 {
            let hs = self.s_step_half[0];
            let mut p = base.clone();
            p[0] += hs;
            seeds.push(p);
            let mut m = base.clone();
            m[0] -= hs;
            seeds.push(m);
        }
        let mut pt = base.clone();
        pt[pd] += dtau;
        seeds.push(pt);
        let mut mt = base.clone();
        mt[pd] -= dtau;
        seeds.push(mt);
        seeds.truncate(defaults::NEWTON_SEEDS);
        seeds
    }

    /// Newton inversion of (s, τ) ↦ X(τ, s) − x with deterministic
    /// multi-start; region tags are valid results, not errors.
    pub fn invert(&self, x: &[f64]) -> Inversion {
        let n = self.flux.dim();
        if x.len() != n {
            return Inversion {
                location: BundleLocation::Outside,
                ambiguous: false,
            };
        }
        let pd = self.start_surface().param_dim();
        // Memoize the last trajectory: τ-perturbations and line-search
        // trials reuse the ray solve at an unchanged s.
        let mut cached: Option<Trajectory> = None;
        let mut residual = |z: &[f64], out: &mut [f64]| -> bool {
            let (s, tau) = z.split_at(pd);
            let hit = matches!(&cached, Some(t) if t.s.as_slice() == s);
            if !hit {
                match self.trajectory(s) {
                    Ok(t) => cached = Some(t),
                    Err(_) => return false,
                }
            }
            let traj = cached.as_ref().unwrap();
            let (xc, _) = self.point_on_trajectory(traj, tau[0]);
            for i in 0..n {
                out[i] = xc[i] - x[i];
            }
            true
        };
        let seeds = self.inversion_seeds(x);
        let (root, ambiguous) =
            newton::multi_start(&mut residual, &seeds, &newton::NewtonOptions::default());
        let Some(z) = root else {
            return Inversion {
                location: BundleLocation::Outside,
                ambiguous,
            };
        };
        let (s, tau) = z.split_at(pd);
        let Ok(traj) = self.trajectory(s) else {
            return Inversion {
                location: BundleLocation::Outside,
                ambiguous,
            };
        };
        let coords = BundleCoords {
            s: s.to_vec(),
            tau: tau[0],
            k: traj.k,
            tau0: traj.tau0,
        };
        let slack = 1e-12 * (1.0 + traj.tau0);
        // τ < 0 leaves through the start surface, which is Γ₂ when the
        // bundle is relabeled.
        let location = if coords.tau < -slack {
            if self.relabeled {
                BundleLocation::AfterGamma2(coords)
            } else {
                BundleLocation::BeforeGamma1(coords)
            }
        } else if coords.tau > traj.tau0 + slack {
            if self.relabeled {
                BundleLocation::BeforeGamma1(coords)
            } else {
                BundleLocation::AfterGamma2(coords)
            }
        } else {
            BundleLocation::Interior(coords)
        };
        Inversion {
            location,
            ambiguous,
        }
    }

    /// u₁(x); errors when x is not inside the bundle band Ω⁰.
    pub fn eval_u1(&self, x: &[f64]) -> Result<f64> {
        match self.invert(x).location {
            BundleLocation::Interior(c) => Ok(self.u_start() - c.k * c.tau),
            _ => Err(Error::OutsideBundle),
        }
    }

    /// Residual of the profile equation Σᵢ fᵢ″(u₁)·∂u₁/∂xᵢ + K at x,
    /// with centered differences at step h. O(h²) for smooth profiles.
    pub fn residual_profile_eq(&self, x: &[f64], h: f64) -> Result<f64> {
        let n = self.flux.dim();
        let inv = self.invert(x);
        let k = match &inv.location {
            BundleLocation::Interior(c) => c.k,
            _ => return Err(Error::OutsideBundle),
        };
        let u1 = self.eval_u1(x)?;
        let mut acc = 0.0;
        let mut xp = x.to_vec();
        for i in 0..n {
            xp[i] = x[i] + h;
            let up = self.eval_u1(&xp)?;
            xp[i] = x[i] - h;
            let um = self.eval_u1(&xp)?;
            xp[i] = x[i];
            acc += self.flux.component(i, u1, 2) * (up - um) / (2.0 * h);
        }
        Ok(acc + k)
    }
}

/// One-dimensional implicit profile: the u solving f′(u) = −Kx + b on the
/// flux's working interval (Newton seeded at the midpoint, bisection
/// fallback), tolerance 1e−12 on the flux residual.
pub fn solve_u1_1d(flux: &FluxModel, k: f64, b: f64, x: f64) -> Result<f64> {
    if flux.dim() != 1 {
        return Err(Error::InvalidInput(
            "the one-dimensional profile needs a scalar flux".into(),
        ));
    }
    if !(k > 0.0) {
        return Err(Error::NonPositiveK { k });
    }
    let (lo, hi) = flux.working_interval();
    let (ok, min_norm) = flux.check_nondegenerate(lo, hi, 64)?;
    if !ok {
        return Err(Error::DegenerateFlux { min_norm });
    }
    let target = -k * x + b;
    let f_lo = flux.component(0, lo, 1);
    let f_hi = flux.component(0, hi, 1);
    let (range_lo, range_hi) = (f_lo.min(f_hi), f_lo.max(f_hi));
    if target < range_lo - defaults::SOLVE1D_TOL || target > range_hi + defaults::SOLVE1D_TOL {
        return Err(Error::TargetOutOfRange {
            target,
            lo: range_lo,
            hi: range_hi,
        });
    }
    newton::scalar_newton_bisect(
        |u| flux.component(0, u, 1),
        |u| flux.component(0, u, 2),
        target,
        lo,
        hi,
        defaults::SOLVE1D_TOL,
        defaults::SOLVE1D_MAX_ITERS,
    )
    .ok_or(Error::NonConvergence {
        what: "one-dimensional profile solve",
        residual: f64::NAN,
    })
}

fn mid_params(param_box: &[(f64, f64)]) -> Vec<f64> {
    param_box.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
}

#[cfg(test)]
pub(crate) mod test_fixtures {
    use super::*;

    pub fn gamma1_a() -> Surface {
        Surface::hyperplane(
            vec![0.0, 0.0],
            vec![vec![1.0, -1.0]],
            Some(vec![1.0, 1.0]),
            vec![(-2.0, 2.0)],
        )
        .unwrap()
    }

    pub fn gamma2_a() -> Surface {
        Surface::hyperplane(
            vec![1.0, 1.0],
            vec![vec![1.0, -1.0]],
            Some(vec![1.0, 1.0]),
            vec![(-2.0, 2.0)],
        )
        .unwrap()
    }

    pub fn gamma2_wide() -> Surface {
        Surface::hyperplane(
            vec![2.0, 2.0],
            vec![vec![1.0, -1.0]],
            Some(vec![1.0, 1.0]),
            vec![(-2.0, 2.0)],
        )
        .unwrap()
    }

    /// Scenario A: Burgers flux in both components, U = 2, u₀⁰ = 1.
    pub fn bundle_a() -> ProfileBundle {
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        ProfileBundle::build(flux, gamma1_a(), gamma2_a(), 2.0, 1.0, 33).unwrap()
    }

    /// Exponential-flux variant on the same surfaces.
    pub fn bundle_exp() -> ProfileBundle {
        let flux = FluxModel::exponential(vec![1.0, 1.0], (0.0, 3.0)).unwrap();
        ProfileBundle::build(flux, gamma1_a(), gamma2_a(), 2.0, 1.0, 33).unwrap()
    }

    /// Scenario B: 1-D Burgers, Γ₁ = {x = −2}, Γ₂ = {x = −1}.
    pub fn bundle_b() -> ProfileBundle {
        let flux = FluxModel::burgers(1, (0.0, 3.0)).unwrap();
        let g1 = Surface::hyperplane(vec![-2.0], vec![], Some(vec![1.0]), vec![]).unwrap();
        let g2 = Surface::hyperplane(vec![-1.0], vec![], Some(vec![1.0]), vec![]).unwrap();
        ProfileBundle::build(flux, g1, g2, 2.0, 1.0, 1).unwrap()
    }
}
