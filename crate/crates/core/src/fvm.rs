//! Independent finite-volume reference solver: first-order dimension-
//! unsplit Rusanov (local Lax–Friedrichs) flux on a rectangular grid,
//! 1-D or 2-D. Monotone under the per-axis CFL bound, so the discrete max
//! principle holds and mass accounting closes to roundoff — both are
//! checked every step and recorded in the state diagnostics.
//!
//! States are immutable snapshots: `step` returns a new state.

use alloc::vec;
use alloc::vec::Vec;

use crate::characteristics::FrontPolyline;
use crate::defaults;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::flux::FluxModel;
use crate::math;

/// Boundary handling of the oracle grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Zero-gradient ghost cells.
    Outflow,
    /// Wrap-around.
    Periodic,
}

/// Running diagnostics accumulated across steps.
#[derive(Debug, Clone)]
pub struct FvmDiag {
    /// Largest per-step mass-accounting residual seen.
    pub max_mass_residual: f64,
    /// Extremes of the initial cell averages.
    pub initial_range: (f64, f64),
    /// Extremes seen over all steps.
    pub min_seen: f64,
    pub max_seen: f64,
    pub steps: usize,
}

/// Finite-volume grid state (cell averages).
#[derive(Debug, Clone)]
pub struct FvmState {
    window: Vec<(f64, f64)>,
    cells: Vec<usize>,
    h: Vec<f64>,
    u: Vec<f64>,
    time: f64,
    boundary: Boundary,
    pub diag: FvmDiag,
}

impl FvmState {
    pub fn dim(&self) -> usize {
        self.window.len()
    }

    pub fn window(&self) -> &[(f64, f64)] {
        &self.window
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Cell widths per axis.
    pub fn spacing(&self) -> &[f64] {
        &self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Center of the cell with per-axis indices `idx`.
    pub fn cell_center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(self.window.iter().zip(&self.h))
            .map(|(&i, ((lo, _), h))| lo + (i as f64 + 0.5) * h)
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.iter().product()
    }

    /// Σ u·vol over the grid.
    pub fn mass(&self) -> f64 {
        self.u.iter().sum::<f64>() * self.cell_volume()
    }

    fn index(&self, ix: usize, iy: usize) -> usize {
        match self.dim() {
            1 => ix,
            _ => iy * self.cells[0] + ix,
        }
    }
}

/// Cell averages of `field` by per-axis midpoint subsampling (3 points
/// per axis, so piecewise data near seams is averaged, not point-sampled).
pub fn init_grid(
    window: &[(f64, f64)],
    resolution: &[usize],
    field: &dyn Field,
    boundary: Boundary,
) -> Result<FvmState> {
    let dim = window.len();
    if dim == 0 || dim > 2 || resolution.len() != dim {
        return Err(Error::InvalidInput(
            "the oracle grid supports 1 or 2 axes, one resolution per axis".into(),
        ));
    }
    if resolution.iter().any(|&r| r < 8) {
        return Err(Error::InvalidInput(
            "oracle resolution must be at least 8 cells per axis".into(),
        ));
    }
    if window.iter().any(|(lo, hi)| !(lo < hi)) {
        return Err(Error::InvalidInput("empty evaluation window".into()));
    }
    let h: Vec<f64> = window
        .iter()
        .zip(resolution)
        .map(|((lo, hi), &r)| (hi - lo) / r as f64)
        .collect();
    let total: usize = resolution.iter().product();
    let mut u = vec![0.0; total];
    let sub = defaults::FVM_INIT_SUBSAMPLES;
    let mut point = vec![0.0; dim];
    let (nx, ny) = (resolution[0], if dim == 2 { resolution[1] } else { 1 });
    for iy in 0..ny {
        for ix in 0..nx {
            let mut acc = 0.0;
            let mut count = 0usize;
            for sy in 0..(if dim == 2 { sub } else { 1 }) {
                for sx in 0..sub {
                    point[0] = window[0].0 + (ix as f64 + (sx as f64 + 0.5) / sub as f64) * h[0];
                    if dim == 2 {
                        point[1] =
                            window[1].0 + (iy as f64 + (sy as f64 + 0.5) / sub as f64) * h[1];
                    }
                    acc += field.eval(&point)?;
                    count += 1;
                }
            }
            u[iy * nx + ix] = acc / count as f64;
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &u {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(FvmState {
        window: window.to_vec(),
        cells: resolution.to_vec(),
        h,
        u,
        time: 0.0,
        boundary,
        diag: FvmDiag {
            max_mass_residual: 0.0,
            initial_range: (lo, hi),
            min_seen: lo,
            max_seen: hi,
            steps: 0,
        },
    })
}

#[inline]
fn rusanov(flux: &FluxModel, axis: usize, ul: f64, ur: f64) -> f64 {
    let fl = flux.component(axis, ul, 0);
    let fr = flux.component(axis, ur, 0);
    let alpha = math::abs(flux.component(axis, ul, 1)).max(math::abs(flux.component(axis, ur, 1)));
    0.5 * (fl + fr) - 0.5 * alpha * (ur - ul)
}

/// One explicit conservative update with dt from the per-axis CFL bound,
/// optionally truncated by `dt_cap` to land on a target time.
pub fn step_with_cap(state: &FvmState, flux: &FluxModel, cfl: f64, dt_cap: f64) -> Result<FvmState> {
    if !(cfl > 0.0) || !(dt_cap > 0.0) {
        return Err(Error::InvalidInput("cfl and dt cap must be positive".into()));
    }
    let dim = state.dim();
    let (nx, ny) = (state.cells[0], if dim == 2 { state.cells[1] } else { 1 });
    // per-axis CFL: dt ≤ cfl·hᵢ / max|fᵢ′(u)|
    let mut dt = dt_cap;
    for axis in 0..dim {
        let mut alpha_max = 0.0f64;
        for &v in &state.u {
            alpha_max = alpha_max.max(math::abs(flux.component(axis, v, 1)));
        }
        if alpha_max > 0.0 {
            dt = dt.min(cfl * state.h[axis] / alpha_max);
        }
    }

    let mut new_u = state.u.clone();
    let mut boundary_net = 0.0; // outward flux integral over the window edge

    // axis 0 sweep
    for iy in 0..ny {
        let row = iy * nx;
        let at = |ix: isize| -> f64 {
            let i = match state.boundary {
                Boundary::Outflow => ix.clamp(0, nx as isize - 1) as usize,
                Boundary::Periodic => ix.rem_euclid(nx as isize) as usize,
            };
            state.u[row + i]
        };
        let mut left_flux = rusanov(flux, 0, at(-1), at(0));
        if state.boundary == Boundary::Outflow {
            boundary_net -= left_flux * transverse_area(state, 0);
        }
        for ix in 0..nx {
            let right_flux = rusanov(flux, 0, at(ix as isize), at(ix as isize + 1));
            new_u[row + ix] -= dt / state.h[0] * (right_flux - left_flux);
            if ix + 1 == nx && state.boundary == Boundary::Outflow {
                boundary_net += right_flux * transverse_area(state, 0);
            }
            left_flux = right_flux;
        }
    }
    // axis 1 sweep
    if dim == 2 {
        for ix in 0..nx {
            let at = |iy: isize| -> f64 {
                let j = match state.boundary {
                    Boundary::Outflow => iy.clamp(0, ny as isize - 1) as usize,
                    Boundary::Periodic => iy.rem_euclid(ny as isize) as usize,
                };
                state.u[j * nx + ix]
            };
            let mut down_flux = rusanov(flux, 1, at(-1), at(0));
            if state.boundary == Boundary::Outflow {
                boundary_net -= down_flux * transverse_area(state, 1);
            }
            for iy in 0..ny {
                let up_flux = rusanov(flux, 1, at(iy as isize), at(iy as isize + 1));
                new_u[iy * nx + ix] -= dt / state.h[1] * (up_flux - down_flux);
                if iy + 1 == ny && state.boundary == Boundary::Outflow {
                    boundary_net += up_flux * transverse_area(state, 1);
                }
                down_flux = up_flux;
            }
        }
    }

    let mut diag = state.diag.clone();
    diag.steps += 1;
    let vol = state.cell_volume();
    let mass_old: f64 = state.u.iter().sum::<f64>() * vol;
    let mut mass_new = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &new_u {
        if !v.is_finite() {
            return Err(Error::Instability {
                time: state.time + dt,
                step: diag.steps,
            });
        }
        mass_new += v;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    mass_new *= vol;
    diag.min_seen = diag.min_seen.min(lo);
    diag.max_seen = diag.max_seen.max(hi);
    let expected_change = match state.boundary {
        Boundary::Outflow => -dt * boundary_net,
        Boundary::Periodic => 0.0,
    };
    let residual = math::abs(mass_new - mass_old - expected_change);
    diag.max_mass_residual = diag.max_mass_residual.max(residual);

    Ok(FvmState {
        window: state.window.clone(),
        cells: state.cells.clone(),
        h: state.h.clone(),
        u: new_u,
        time: state.time + dt,
        boundary: state.boundary,
        diag,
    })
}

fn transverse_area(state: &FvmState, axis: usize) -> f64 {
    if state.dim() == 1 {
        1.0
    } else {
        state.h[1 - axis]
    }
}

/// One CFL-limited step.
pub fn step(state: &FvmState, flux: &FluxModel, cfl: f64) -> Result<FvmState> {
    step_with_cap(state, flux, cfl, f64::INFINITY)
}

/// Repeated steps, the last one truncated to land exactly on t_target.
pub fn run_to(state: &FvmState, flux: &FluxModel, t_target: f64, cfl: f64) -> Result<FvmState> {
    if t_target < state.time {
        return Err(Error::InvalidInput(
            "target time is before the state's current time".into(),
        ));
    }
    let mut current = state.clone();
    while current.time < t_target {
        let next = step_with_cap(&current, flux, cfl, t_target - current.time)?;
        if next.time == current.time {
            break; // remaining dt below the time resolution
        }
        current = next;
    }
    // the last capped step can land one ulp short
    if current.time != t_target
        && (t_target - current.time) <= 8.0 * f64::EPSILON * t_target.abs().max(1.0)
    {
        current.time = t_target;
    }
    Ok(current)
}

/// Per-row level crossings of u = (u_behind + u_ahead)/2, linearly
/// interpolated between bracketing cells and assembled into an ordered
/// polyline (a single point in 1-D). Normals are oriented toward the
/// `u_ahead` side.
pub fn extract_front(state: &FvmState, u_behind: f64, u_ahead: f64) -> Result<FrontPolyline> {
    let level = 0.5 * (u_behind + u_ahead);
    let dim = state.dim();
    let nx = state.cells[0];
    let mut points: Vec<Vec<f64>> = Vec::new();
    let ny = if dim == 2 { state.cells[1] } else { 1 };
    for iy in 0..ny {
        let mut crossing: Option<f64> = None;
        for ix in 0..nx.saturating_sub(1) {
            let a = state.u[state.index(ix, iy)] - level;
            let b = state.u[state.index(ix + 1, iy)] - level;
            if a == 0.0 {
                let c = state.cell_center(&[ix, iy][..dim]);
                crossing = Some(c[0]);
                break;
            }
            if a.signum() != b.signum() {
                let w = a / (a - b);
                let x_lo = state.window[0].0 + (ix as f64 + 0.5) * state.h[0];
                crossing = Some(x_lo + w * state.h[0]);
                break;
            }
        }
        if let Some(cx) = crossing {
            if dim == 1 {
                points.push(vec![cx]);
            } else {
                let cy = state.window[1].0 + (iy as f64 + 0.5) * state.h[1];
                points.push(vec![cx, cy]);
            }
        }
    }
    if points.is_empty() || (dim == 2 && points.len() < 2) {
        return Err(Error::NoFrontFound);
    }
    let mut front = FrontPolyline::new(points, u_behind, u_ahead, state.time, None)?;
    orient_front_normals(state, &mut front);
    Ok(front)
}

/// Flip normals so each points from the behind state toward the ahead
/// state, judged by the nearest cell value one cell width along ±n.
fn orient_front_normals(state: &FvmState, front: &mut FrontPolyline) {
    let dim = state.dim();
    let probe = |x: &[f64]| -> Option<f64> {
        let mut idx = [0usize; 2];
        for a in 0..dim {
            let (lo, hi) = state.window[a];
            if x[a] < lo || x[a] > hi {
                return None;
            }
            let i = ((x[a] - lo) / state.h[a]) as usize;
            idx[a] = i.min(state.cells[a] - 1);
        }
        Some(state.u[state.index(idx[0], if dim == 2 { idx[1] } else { 0 })])
    };
    for (p, n) in front.points.iter().zip(front.normals.iter_mut()) {
        let h = state.h[0];
        let ahead_probe: Vec<f64> = p.iter().zip(n.iter()).map(|(a, b)| a + h * b).collect();
        if let Some(u) = probe(&ahead_probe) {
            let d_ahead = math::abs(u - front.u_ahead);
            let d_behind = math::abs(u - front.u_behind);
            if d_ahead > d_behind {
                for c in n.iter_mut() {
                    *c = -*c;
                }
            }
        }
    }
}

/// L1 distance between the state and a reference field sampled at cell
/// centers: Σ |u_cell − ref(center)|·vol.
pub fn l1_distance(state: &FvmState, reference: &dyn Field) -> Result<f64> {
    l1_distance_interior(state, reference, 0.0).map(|(l1, _)| l1)
}

/// L1 distance restricted to cells at least `margin` from every window
/// edge, plus the number of cells counted. Information in the explicit
/// scheme travels at most one cell per step, i.e. at speed max|f′|/cfl,
/// so a margin of t·max|f′|/cfl removes every cell the boundary model
/// could have influenced by time t: on that subdomain the state solves
/// the pure Cauchy problem the reference describes.
pub fn l1_distance_interior(
    state: &FvmState,
    reference: &dyn Field,
    margin: f64,
) -> Result<(f64, usize)> {
    let dim = state.dim();
    let nx = state.cells[0];
    let ny = if dim == 2 { state.cells[1] } else { 1 };
    let vol = state.cell_volume();
    let mut acc = 0.0;
    let mut counted = 0usize;
    for iy in 0..ny {
        for ix in 0..nx {
            let idx: Vec<usize> = if dim == 1 { vec![ix] } else { vec![ix, iy] };
            let center = state.cell_center(&idx);
            let interior = center
                .iter()
                .zip(&state.window)
                .all(|(v, (lo, hi))| v - lo >= margin && hi - v >= margin);
            if !interior {
                continue;
            }
            let r = reference.eval(&center)?;
            acc += math::abs(state.u[state.index(ix, iy)] - r) * vol;
            counted += 1;
        }
    }
    Ok((acc, counted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ConstantField, FnField};
    use crate::initial::PiecewiseField;
    use crate::profile::test_fixtures::{bundle_a, bundle_b};

    #[test]
    fn constant_state_is_a_fixed_point() {
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let state = init_grid(
            &[(-1.0, 1.0), (-1.0, 1.0)],
            &[16, 16],
            &ConstantField(1.5),
            Boundary::Outflow,
        )
        .unwrap();
        let next = step(&state, &flux, 0.4).unwrap();
        assert_eq!(next.values(), state.values());
        assert!(next.diag.max_mass_residual < 1e-14);
    }

    #[test]
    fn initial_field_range_scenario_a() {
        let b = bundle_a();
        let f = PiecewiseField::new(&b);
        let state = init_grid(
            &[(-3.0, 5.0), (-3.0, 5.0)],
            &[64, 64],
            &f,
            Boundary::Outflow,
        )
        .unwrap();
        let (lo, hi) = state.diag.initial_range;
        assert!(lo >= 1.0 - 1e-12 && hi <= 2.0 + 1e-12, "({lo}, {hi})");
    }

    #[test]
    fn scenario_b_profile_shape() {
        let b = bundle_b();
        let f = PiecewiseField::new(&b);
        let state =
            init_grid(&[(-4.0, 2.0)], &[128], &f, Boundary::Outflow).unwrap();
        // piecewise 2 / ramp / 1
        let v = state.values();
        assert!((v[0] - 2.0).abs() < 1e-12);
        assert!((v[127] - 1.0).abs() < 1e-12);
        let mid = state.u[((-1.5 - -4.0) / state.h[0]) as usize];
        assert!((mid - 1.5).abs() < 0.05, "mid = {mid}");
    }

    #[test]
    fn max_principle_and_mass_conservation() {
        let b = bundle_b();
        let f = PiecewiseField::new(&b);
        let state = init_grid(&[(-4.0, 2.0)], &[128], &f, Boundary::Outflow).unwrap();
        let flux = FluxModel::burgers(1, (0.0, 3.0)).unwrap();
        let end = run_to(&state, &flux, 1.5, 0.4).unwrap();
        assert!(end.diag.min_seen >= 1.0 - 1e-13);
        assert!(end.diag.max_seen <= 2.0 + 1e-13);
        assert!(end.diag.max_mass_residual <= defaults::FVM_MASS_TOL_PER_CELL * 128.0);
        assert!(end.diag.steps > 0);
        assert!((end.time() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn run_to_current_time_is_a_no_op() {
        let flux = FluxModel::burgers(1, (0.0, 3.0)).unwrap();
        let state =
            init_grid(&[(-1.0, 1.0)], &[16], &ConstantField(1.5), Boundary::Outflow).unwrap();
        let same = run_to(&state, &flux, 0.0, 0.4).unwrap();
        assert_eq!(same.values(), state.values());
        assert_eq!(same.diag.steps, 0);
    }

    #[test]
    fn periodic_boundary_conserves_exactly() {
        let flux = FluxModel::burgers(1, (-2.0, 2.0)).unwrap();
        let f = FnField(|x: &[f64]| Ok((x[0] * core::f64::consts::PI).sin() * 0.5));
        let state = init_grid(&[(-1.0, 1.0)], &[64], &f, Boundary::Periodic).unwrap();
        let mass0 = state.mass();
        let end = run_to(&state, &flux, 0.3, 0.4).unwrap();
        assert!((end.mass() - mass0).abs() < 1e-12);
    }

    #[test]
    fn single_step_tracks_characteristic_solution() {
        use crate::characteristics::CharSolution;
        let b = bundle_b();
        let f = PiecewiseField::new(&b);
        let state = init_grid(&[(-4.0, 2.0)], &[256], &f, Boundary::Outflow).unwrap();
        let flux = FluxModel::burgers(1, (0.0, 3.0)).unwrap();
        let stepped = step(&state, &flux, 0.4).unwrap();
        let sol = CharSolution::new(&b, stepped.time()).unwrap();
        let err = l1_distance(&stepped, &sol).unwrap();
        assert!(err < 4.0 * state.h[0], "L1 = {err}");
    }

    #[test]
    fn front_extraction_1d() {
        // a sharp step at x = 0.25
        let f = FnField(|x: &[f64]| Ok(if x[0] <= 0.25 { 2.0 } else { 1.0 }));
        let state = init_grid(&[(-1.0, 1.0)], &[128], &f, Boundary::Outflow).unwrap();
        let front = extract_front(&state, 2.0, 1.0).unwrap();
        assert_eq!(front.points.len(), 1);
        assert!((front.points[0][0] - 0.25).abs() <= state.h[0]);
        assert_eq!(front.normals[0], vec![1.0]);
    }

    #[test]
    fn no_front_in_smooth_data() {
        let f = FnField(|x: &[f64]| Ok(1.5 + 0.001 * x[0]));
        let state = init_grid(&[(-1.0, 1.0)], &[64], &f, Boundary::Outflow).unwrap();
        // level (2+1)/2 = 1.5 ± tiny slope: crossings exist… use states far
        // from the data range instead so no admissible crossing exists.
        assert!(matches!(
            extract_front(&state, 10.0, 9.0),
            Err(Error::NoFrontFound)
        ));
    }

    #[test]
    fn diagonal_front_extraction_2d() {
        let f = FnField(|x: &[f64]| Ok(if x[0] + x[1] <= 0.5 { 2.0 } else { 1.0 }));
        let state = init_grid(
            &[(-2.0, 2.0), (-2.0, 2.0)],
            &[100, 100],
            &f,
            Boundary::Outflow,
        )
        .unwrap();
        let front = extract_front(&state, 2.0, 1.0).unwrap();
        assert!(front.points.len() > 50);
        for p in &front.points {
            assert!((p[0] + p[1] - 0.5).abs() <= 2.0 * state.h[0], "{p:?}");
        }
        // normals point toward the low (ahead) side
        for n in &front.normals {
            assert!(n[0] > 0.0 && n[1] > 0.0);
        }
    }

    #[test]
    fn l1_distance_of_state_with_itself_is_zero() {
        let b = bundle_a();
        let f = PiecewiseField::new(&b);
        let state = init_grid(
            &[(-3.0, 5.0), (-3.0, 5.0)],
            &[32, 32],
            &f,
            Boundary::Outflow,
        )
        .unwrap();
        let self_ref = FnField(|x: &[f64]| {
            let (lo0, lo1) = (-3.0f64, -3.0f64);
            let h = 0.25;
            let ix = (((x[0] - lo0) / h) as usize).min(31);
            let iy = (((x[1] - lo1) / h) as usize).min(31);
            Ok(state.values()[iy * 32 + ix])
        });
        assert_eq!(l1_distance(&state, &self_ref).unwrap(), 0.0);
    }
}
