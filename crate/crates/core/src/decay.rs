//! Decay of an absolutely nonstable step into a rarefaction fan: for
//! t > 0 the solution in the wedge between the advected front copies
//! Γ₁ᵗ = Γ₀ + t·f′(U) and Γ₂ᵗ = Γ₀ + t·f′(u₀⁰) is defined by
//!
//!   x = χ⁰(σ) + t·f′(v),   v between u₀⁰ and U,
//!
//! with the constant states outside the wedge — the time-reversed image
//! of the formation construction. Construction is refused unless the step
//! is absolutely nonstable and the field vectors are transversal to Γ₀
//! at every sampled point.
//!
//! The existence horizon t̄ is operational: the largest time at which the
//! sampled fan map stays injective (trajectories launched from distinct
//! front parameters keep separated images), capped at the time the wedge
//! leaves the evaluation window. Both quantities are reported.

use alloc::vec;
use alloc::vec::Vec;

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::{Field, StepField};
use crate::flux::FluxModel;
use crate::geometry::Surface;
use crate::linalg;
use crate::math;
use crate::newton;
use crate::stability::{check_transversality, classify_jump, JumpClass};

/// Sampling and window choices for the fan construction.
#[derive(Debug, Clone)]
pub struct FanOptions {
    /// Γ₀ parameter samples per axis for hypothesis and injectivity checks.
    pub s_per_axis: usize,
    /// State samples between u₀⁰ and U.
    pub v_samples: usize,
    /// Evaluation window (one (lo, hi) per axis).
    pub window: Vec<(f64, f64)>,
}

impl FanOptions {
    pub fn new(window: Vec<(f64, f64)>) -> Self {
        Self {
            s_per_axis: 17,
            v_samples: defaults::FAN_V_SAMPLES,
            window,
        }
    }
}

/// The constructed fan solution.
#[derive(Debug, Clone)]
pub struct FanSolution {
    gamma0: Surface,
    flux: FluxModel,
    /// State on the g₀ < 0 side.
    u_behind: f64,
    /// State on the g₀ > 0 side.
    u_ahead: f64,
    v_lo: f64,
    v_hi: f64,
    t_bar: f64,
    t_bar_capped: bool,
    window_exit: Option<f64>,
    /// Reduced scalar evaluation applies (planar front, one flux ray).
    planar_reduced: bool,
    sigma_samples: Vec<Vec<f64>>,
    v_grid: Vec<f64>,
}

/// Exit time of the ray p + t·v from the window box (∞ when v never
/// reaches a face; 0 when p starts outside).
fn ray_box_exit(p: &[f64], v: &[f64], window: &[(f64, f64)]) -> f64 {
    let mut exit = f64::INFINITY;
    for i in 0..p.len() {
        let (lo, hi) = window[i];
        if p[i] < lo || p[i] > hi {
            return 0.0;
        }
        if v[i] > 0.0 {
            exit = exit.min((hi - p[i]) / v[i]);
        } else if v[i] < 0.0 {
            exit = exit.min((lo - p[i]) / v[i]);
        }
    }
    exit
}

/// Build the fan for the step U + H(g₀)(u₀⁰ − U); refused when the
/// hypotheses (absolute nonstability, transversality) fail anywhere.
pub fn build_fan(
    gamma0: Surface,
    flux: FluxModel,
    u_behind: f64,
    u_ahead: f64,
    opts: &FanOptions,
) -> Result<FanSolution> {
    let n = flux.dim();
    if gamma0.ambient_dim() != n || opts.window.len() != n {
        return Err(Error::InvalidInput(
            "front, flux, and window dimensions disagree".into(),
        ));
    }
    if u_behind == u_ahead {
        return Err(Error::NotAJump { spread: 0.0 });
    }
    let scale = opts
        .window
        .iter()
        .map(|(lo, hi)| hi - lo)
        .fold(0.0f64, f64::max);

    // Transversality first: the classifying limits run along f″ and only
    // see the jump when those vectors actually cross the front.
    let transversal = check_transversality(&flux, &gamma0, u_behind, u_ahead, opts.s_per_axis)?;
    if transversal.iter().any(|(_, ok)| !ok) {
        return Err(Error::HypothesesFailed(
            "a field vector is tangent to the front",
        ));
    }
    let step = StepField {
        surface: &gamma0,
        behind: u_behind,
        ahead: u_ahead,
    };
    for s in gamma0.sample_params(opts.s_per_axis) {
        let x = gamma0.point(&s)?;
        let verdict = classify_jump(&step, &flux, &x, u_behind, u_ahead, scale)?;
        if verdict.class != JumpClass::AbsolutelyNonstable {
            return Err(Error::HypothesesFailed(
                "the step is not absolutely nonstable on the front",
            ));
        }
    }

    let (v_lo, v_hi) = (u_behind.min(u_ahead), u_behind.max(u_ahead));
    let v_grid: Vec<f64> = (0..opts.v_samples.max(2))
        .map(|j| v_lo + (v_hi - v_lo) * j as f64 / (opts.v_samples.max(2) - 1) as f64)
        .collect();
    let sigma_samples = gamma0.sample_params(opts.s_per_axis);

    // planar reduction: hyperplane front and all f′(v) on one ray
    let planar_reduced = gamma0.as_hyperplane().is_some() && {
        let mut fp_hi = vec![0.0; n];
        flux.fill(v_hi, 1, &mut fp_hi);
        let mut e = fp_hi.clone();
        if linalg::normalize(&mut e) == 0.0 {
            false
        } else {
            let mut buf = vec![0.0; n];
            v_grid.iter().all(|&v| {
                flux.fill(v, 1, &mut buf);
                let along = linalg::dot(&buf, &e);
                let mut off_ray2 = 0.0;
                for i in 0..n {
                    let r = buf[i] - along * e[i];
                    off_ray2 += r * r;
                }
                math::sqrt(off_ray2) <= 1e-12 * linalg::norm(&buf).max(1.0)
            })
        }
    };

    // time the wedge boundary leaves the window
    let mut exit = f64::INFINITY;
    let mut buf = vec![0.0; n];
    for s in &sigma_samples {
        let p = gamma0.point(s)?;
        for c in [u_behind, u_ahead] {
            flux.fill(c, 1, &mut buf);
            let e = ray_box_exit(&p, &buf, &opts.window);
            if e > 0.0 {
                exit = exit.min(e);
            }
        }
    }
    let window_exit = exit.is_finite().then_some(exit);
    let t_cap = window_exit.unwrap_or(1e6);

    let mut fan = FanSolution {
        gamma0,
        flux,
        u_behind,
        u_ahead,
        v_lo,
        v_hi,
        t_bar: t_cap,
        t_bar_capped: true,
        window_exit,
        planar_reduced,
        sigma_samples,
        v_grid,
    };

    if !fan.injective_at(t_cap)? {
        let mut lo = defaults::FAN_TBAR_TOL;
        if !fan.injective_at(lo)? {
            return Err(Error::HypothesesFailed(
                "the fan map is not injective even near t = 0",
            ));
        }
        let mut hi = t_cap;
        while hi - lo > defaults::FAN_TBAR_TOL {
            let mid = 0.5 * (lo + hi);
            if fan.injective_at(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        fan.t_bar = lo;
        fan.t_bar_capped = false;
    }
    Ok(fan)
}

impl FanSolution {
    pub fn gamma0(&self) -> &Surface {
        &self.gamma0
    }

    pub fn flux(&self) -> &FluxModel {
        &self.flux
    }

    pub fn u_behind(&self) -> f64 {
        self.u_behind
    }

    pub fn u_ahead(&self) -> f64 {
        self.u_ahead
    }

    /// Existence horizon: sampled injectivity bound, possibly capped at
    /// the window-exit time.
    pub fn t_bar(&self) -> f64 {
        self.t_bar
    }

    /// True when t̄ is the cap, not an observed injectivity loss.
    pub fn t_bar_capped(&self) -> bool {
        self.t_bar_capped
    }

    /// Time the wedge boundary first leaves the evaluation window.
    pub fn window_exit(&self) -> Option<f64> {
        self.window_exit
    }

    /// Whether the reduced scalar relation is in use.
    pub fn planar_reduced(&self) -> bool {
        self.planar_reduced
    }

    /// Distinct-launch-parameter image separation at time t.
    fn injective_at(&self, t: f64) -> Result<bool> {
        let n = self.flux.dim();
        if self.sigma_samples.len() < 2 {
            return Ok(true);
        }
        let mut images: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut buf = vec![0.0; n];
        for (si, s) in self.sigma_samples.iter().enumerate() {
            let p = self.gamma0.point(s)?;
            for &v in &self.v_grid {
                self.flux.fill(v, 1, &mut buf);
                images.push((si, linalg::add_scaled(&p, t, &buf)));
            }
        }
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if images[i].0 != images[j].0
                    && linalg::dist(&images[i].1, &images[j].1) <= defaults::FAN_INJECTIVITY_EPS
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Fixed-time view of the fan (precomputes the inversion seeds).
    pub fn at_time(&self, t: f64) -> Result<FanSlice<'_>> {
        if !(t > 0.0) || t > self.t_bar * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(alloc::format!(
                "fan evaluation time {t} outside (0, {}]",
                self.t_bar
            )));
        }
        let n = self.flux.dim();
        let mut fp_behind = vec![0.0; n];
        let mut fp_ahead = vec![0.0; n];
        self.flux.fill(self.u_behind, 1, &mut fp_behind);
        self.flux.fill(self.u_ahead, 1, &mut fp_ahead);
        let mut seeds = Vec::with_capacity(self.sigma_samples.len() * self.v_grid.len());
        let mut buf = vec![0.0; n];
        for s in &self.sigma_samples {
            let p = self.gamma0.point(s)?;
            for &v in &self.v_grid {
                self.flux.fill(v, 1, &mut buf);
                seeds.push((s.clone(), v, linalg::add_scaled(&p, t, &buf)));
            }
        }
        Ok(FanSlice {
            fan: self,
            t,
            fp_behind,
            fp_ahead,
            seeds,
        })
    }

    /// u(x, t) for 0 < t ≤ t̄.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<f64> {
        self.at_time(t)?.eval(x)
    }
}

/// The fan at one time, evaluable as a field.
pub struct FanSlice<'a> {
    fan: &'a FanSolution,
    t: f64,
    fp_behind: Vec<f64>,
    fp_ahead: Vec<f64>,
    seeds: Vec<(Vec<f64>, f64, Vec<f64>)>,
}

impl FanSlice<'_> {
    pub fn time(&self) -> f64 {
        self.t
    }

    /// behind / fan / ahead region of a point.
    pub fn region(&self, x: &[f64]) -> Result<FanRegion> {
        let fan = self.fan;
        let back_behind = linalg::add_scaled(x, -self.t, &self.fp_behind);
        let back_ahead = linalg::add_scaled(x, -self.t, &self.fp_ahead);
        let behind = fan.gamma0.implicit(&back_behind) <= 0.0;
        let ahead = fan.gamma0.implicit(&back_ahead) >= 0.0;
        match (behind, ahead) {
            (true, false) => Ok(FanRegion::Behind),
            (false, true) => Ok(FanRegion::Ahead),
            (false, false) => Ok(FanRegion::Wedge),
            (true, true) => Err(Error::AmbiguousRegion),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let fan = self.fan;
        match self.region(x)? {
            FanRegion::Behind => Ok(fan.u_behind),
            FanRegion::Ahead => Ok(fan.u_ahead),
            FanRegion::Wedge => {
                if fan.planar_reduced {
                    self.eval_reduced(x)
                } else {
                    self.eval_newton(x)
                }
            }
        }
    }

    /// Planar fronts with a single flux ray: v solves the scalar relation
    /// ⟨x − p₀, n⟩ = t·⟨f′(v), n⟩.
    fn eval_reduced(&self, x: &[f64]) -> Result<f64> {
        let fan = self.fan;
        let (p0, normal) = fan.gamma0.as_hyperplane().expect("planar fan");
        let delta = linalg::dot(&linalg::sub(x, p0), normal);
        let target = delta / self.t;
        let flux = &fan.flux;
        let q = |v: f64| {
            let mut acc = 0.0;
            for i in 0..flux.dim() {
                acc += flux.component(i, v, 1) * normal[i];
            }
            acc
        };
        let dq = |v: f64| {
            let mut acc = 0.0;
            for i in 0..flux.dim() {
                acc += flux.component(i, v, 2) * normal[i];
            }
            acc
        };
        newton::scalar_newton_bisect(
            q,
            dq,
            target,
            fan.v_lo,
            fan.v_hi,
            defaults::SOLVE1D_TOL,
            defaults::SOLVE1D_MAX_ITERS,
        )
        .ok_or(Error::NonConvergence {
            what: "reduced fan solve",
            residual: f64::NAN,
        })
        .map(|v| v.clamp(fan.v_lo, fan.v_hi))
    }

    /// General route: Newton on (σ, v) ↦ χ⁰(σ) + t·f′(v) − x.
    fn eval_newton(&self, x: &[f64]) -> Result<f64> {
        let fan = self.fan;
        let n = fan.flux.dim();
        let pd = fan.gamma0.param_dim();
        let mut buf = vec![0.0; n];
        let mut residual = |z: &[f64], out: &mut [f64]| -> bool {
            let (sigma, v) = z.split_at(pd);
            let Ok(p) = fan.gamma0.point_extended(sigma) else {
                return false;
            };
            fan.flux.fill(v[0], 1, &mut buf);
            for i in 0..n {
                out[i] = p[i] + self.t * buf[i] - x[i];
            }
            true
        };
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, (_, _, img)) in self.seeds.iter().enumerate() {
            let d = linalg::dist(img, x);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        let (s0, v0, _) = &self.seeds[best];
        let dv = 0.5 * (fan.v_hi - fan.v_lo) / (fan.v_grid.len() - 1) as f64;
        let base: Vec<f64> = s0.iter().cloned().chain(core::iter::once(*v0)).collect();
        let mut starts = vec![base.clone()];
        if pd > 0 {
            let (lo, hi) = fan.gamma0.param_box()[0];
            let hs = 0.5 * (hi - lo) / (fan.sigma_samples.len().max(2) - 1) as f64;
            for sign in [1.0, -1.0] {
                let mut p = base.clone();
                p[0] += sign * hs;
                starts.push(p);
            }
        }
        for sign in [1.0, -1.0] {
            let mut p = base.clone();
            p[pd] += sign * dv;
            starts.push(p);
        }
        starts.truncate(defaults::NEWTON_SEEDS);
        let (root, _) =
            newton::multi_start(&mut residual, &starts, &newton::NewtonOptions::default());
        let z = root.ok_or(Error::NonConvergence {
            what: "fan wedge solve",
            residual: f64::NAN,
        })?;
        let v = z[pd];
        let tol = 1e-8 * (1.0 + fan.v_hi - fan.v_lo);
        if v < fan.v_lo - tol || v > fan.v_hi + tol {
            return Err(Error::NonConvergence {
                what: "fan wedge solve landed outside the state range",
                residual: f64::NAN,
            });
        }
        Ok(v.clamp(fan.v_lo, fan.v_hi))
    }
}

/// Tag of a point relative to the fan wedge at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FanRegion {
    Behind,
    Wedge,
    Ahead,
}

impl FanRegion {
    pub fn tag(&self) -> &'static str {
        match self {
            FanRegion::Behind => "behind",
            FanRegion::Wedge => "fan",
            FanRegion::Ahead => "ahead",
        }
    }
}

impl Field for FanSlice<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        FanSlice::eval(self, x)
    }

    fn region_id(&self, x: &[f64]) -> Option<u8> {
        self.region(x).ok().map(|r| r as u8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristics::advect;

    fn burgers_1d_fan() -> FanSolution {
        let flux = FluxModel::burgers(1, (0.0, 3.0)).unwrap();
        let g0 = Surface::hyperplane(vec![0.0], vec![], Some(vec![1.0]), vec![]).unwrap();
        build_fan(g0, flux, 1.0, 2.0, &FanOptions::new(vec![(-1.0, 3.0)])).unwrap()
    }

    fn scenario_a_fan() -> FanSolution {
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let g0 = Surface::hyperplane(
            vec![0.0, 0.0],
            vec![vec![1.0, -1.0]],
            Some(vec![1.0, 1.0]),
            vec![(-2.0, 2.0)],
        )
        .unwrap();
        build_fan(g0, flux, 1.0, 2.0, &FanOptions::new(vec![(-3.0, 5.0), (-3.0, 5.0)])).unwrap()
    }

    #[test]
    fn one_dimensional_fan_profile() {
        let fan = burgers_1d_fan();
        assert!(fan.t_bar_capped());
        let t = 0.5;
        assert!((fan.eval(&[1.5 * t], t).unwrap() - 1.5).abs() < 1e-10);
        assert!((fan.eval(&[-1.0], t).unwrap() - 1.0).abs() < 1e-12);
        assert!((fan.eval(&[2.5], t).unwrap() - 2.0).abs() < 1e-12);
        // interior of the wedge: u = x/t
        for k in 1..10 {
            let x = t + (2.0 * t - t) * k as f64 / 10.0;
            assert!((fan.eval(&[x], t).unwrap() - x / t).abs() < 1e-10);
        }
    }

    #[test]
    fn scenario_a_fan_profile() {
        let fan = scenario_a_fan();
        let t = 0.5;
        // u = (x₁+x₂)/(2t) inside the wedge
        let u = fan.eval(&[0.9, 0.6], t).unwrap();
        assert!((u - 1.5).abs() < 1e-10, "u = {u}");
        assert!((fan.eval(&[-1.0, -1.0], t).unwrap() - 1.0).abs() < 1e-12);
        assert!((fan.eval(&[3.0, 3.0], t).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn stable_orientation_is_refused() {
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let g0 = Surface::hyperplane(
            vec![0.0, 0.0],
            vec![vec![1.0, -1.0]],
            Some(vec![1.0, 1.0]),
            vec![(-2.0, 2.0)],
        )
        .unwrap();
        let err = build_fan(g0, flux, 2.0, 1.0, &FanOptions::new(vec![(-3.0, 5.0), (-3.0, 5.0)]))
            .unwrap_err();
        assert!(matches!(err, Error::HypothesesFailed(_)), "{err:?}");
    }

    #[test]
    fn tangent_front_is_refused() {
        // Γ₀ = {x₁ − x₂ = 0} is tangent to the flux ray (1,1).
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let g0 = Surface::hyperplane(
            vec![0.0, 0.0],
            vec![vec![1.0, 1.0]],
            Some(vec![1.0, -1.0]),
            vec![(-2.0, 2.0)],
        )
        .unwrap();
        let err = build_fan(g0, flux, 1.0, 2.0, &FanOptions::new(vec![(-3.0, 5.0), (-3.0, 5.0)]))
            .unwrap_err();
        assert!(matches!(err, Error::HypothesesFailed(_)));
    }

    /// The fan converges pointwise (off the front) to the step as t → 0⁺.
    #[test]
    fn initial_step_recovered() {
        let fan = burgers_1d_fan();
        let t = 1e-6;
        for x in [-0.5, -0.01, 0.01, 0.5] {
            let u = fan.eval(&[x], t).unwrap();
            let step = if x <= 0.0 { 1.0 } else { 2.0 };
            assert!((u - step).abs() < 1e-6, "u({x}) = {u}");
        }
    }

    /// Values stay within the state range everywhere.
    #[test]
    fn range_bound() {
        let fan = scenario_a_fan();
        for t in [0.25, 0.5, 1.0] {
            let slice = fan.at_time(t).unwrap();
            for i in 0..15 {
                for j in 0..15 {
                    let x = [-2.0 + 6.0 * i as f64 / 14.0, -2.0 + 6.0 * j as f64 / 14.0];
                    let u = slice.eval(&x).unwrap();
                    assert!((1.0..=2.0).contains(&u));
                }
            }
        }
    }

    /// Values approach the constant states at the advected bounding
    /// surfaces.
    #[test]
    fn boundary_continuity() {
        let fan = burgers_1d_fan();
        let t = 0.5;
        let eps = 1e-7;
        // Γ₁ᵗ at x = t (behind state 1), Γ₂ᵗ at x = 2t (ahead state 2)
        for (edge, state) in [(t, 1.0), (2.0 * t, 2.0)] {
            for sign in [-1.0, 1.0] {
                let u = fan.eval(&[edge + sign * eps], t).unwrap();
                assert!((u - state).abs() < 1e-6, "u({}) = {u}", edge + sign * eps);
            }
        }
        let planar = scenario_a_fan();
        let u = planar.eval(&[t + 1e-7, t - 1e-8], t).unwrap();
        assert!((u - 1.0).abs() < 1e-6);
    }

    /// Self-similarity: the value depends only on (signed distance)/t.
    #[test]
    fn self_similar_in_distance_over_time() {
        let fan = scenario_a_fan();
        let ratios = [0.3, 1.1, 2.3];
        for &r in &ratios {
            let mut values = Vec::new();
            for &t in &[0.2, 0.4, 0.8] {
                let delta = r * t; // signed distance along n = (1,1)/√2
                let along = delta / core::f64::consts::SQRT_2;
                values.push(fan.eval(&[along, along], t).unwrap());
            }
            for v in &values {
                assert!((v - values[0]).abs() < 1e-8, "{values:?}");
            }
        }
    }

    /// Reduced scalar route agrees with the general Newton route.
    #[test]
    fn reduced_and_newton_routes_agree() {
        let fan = scenario_a_fan();
        assert!(fan.planar_reduced());
        let t = 0.5;
        let slice = fan.at_time(t).unwrap();
        for k in 0..20 {
            let c = 1.05 + (1.95 - 1.05) * k as f64 / 19.0; // wedge: c = (x₁+x₂)/(2t)·...
            let x = [c * t, c * t]; // x₁+x₂ = 2ct ∈ (2t, 4t)
            let reduced = slice.eval_reduced(&x).unwrap();
            let general = slice.eval_newton(&x).unwrap();
            assert!((reduced - general).abs() < 1e-9, "{reduced} vs {general}");
        }
    }

    /// Re-evolving fan data by characteristics reproduces the fan later.
    #[test]
    fn reverse_check_by_characteristics() {
        let fan = burgers_1d_fan();
        let (t1, t2) = (0.25, 0.5);
        let s1 = fan.at_time(t1).unwrap();
        let s2 = fan.at_time(t2).unwrap();
        for k in 0..40 {
            let x = [-0.5 + 2.0 * k as f64 / 39.0];
            let u = s1.eval(&x).unwrap();
            let moved = advect(fan.flux(), &x, u, t2 - t1);
            let u2 = s2.eval(&moved).unwrap();
            assert!((u2 - u).abs() < 1e-7, "u = {u}, re-evaluated {u2}");
        }
    }
}
