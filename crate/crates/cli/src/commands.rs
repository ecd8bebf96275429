//! Command implementations. Every command validates what it needs from
//! the scenario, writes its artifacts plus `report.txt` into the output
//! directory, and reports failures through `RunError` so the binary can
//! map them to exit codes (1 validation, 2 numerical).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use shockform_core::characteristics::{
    breaking_time, focus_point, propagate_front, CharSolution, FrontPolyline,
};
use shockform_core::decay::{build_fan, FanOptions};
use shockform_core::field::{Field, StepField};
use shockform_core::fvm;
use shockform_core::geometry::Surface;
use shockform_core::initial::PiecewiseField;
use shockform_core::level::psi_gap;
use shockform_core::profile::ProfileBundle;
use shockform_core::stability::classify_jump;
use shockform_core::Error as CoreError;

use crate::csvio::{time_tag, write_csv, Cell};
use crate::scenario::Scenario;

/// Failure classification for exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Scenario or invocation problems (exit 1).
    Validation(String),
    /// Numerical failures: missed rays, non-convergence, instability (exit 2).
    Numerical(CoreError),
    /// Filesystem trouble (exit 1).
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Validation(msg) => write!(f, "validation: {msg}"),
            RunError::Numerical(e) => write!(f, "numerical: {e}"),
            RunError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(msg) => RunError::Validation(msg),
            other => RunError::Numerical(other),
        }
    }
}

/// Per-invocation options on top of the scenario document.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub resolution: Option<usize>,
    pub times: Option<Vec<f64>>,
    pub front_dt: Option<f64>,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            ..Self::default()
        }
    }

    fn resolution(&self, scenario: &Scenario) -> usize {
        self.resolution.unwrap_or(scenario.fvm_resolution)
    }

    fn times(&self, scenario: &Scenario) -> Vec<f64> {
        let mut t = self
            .times
            .clone()
            .unwrap_or_else(|| scenario.times.clone());
        t.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
        t
    }
}

/// Accumulates the run report; written even on failure.
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str, scenario: &Scenario) -> Self {
        let mut r = Self { lines: Vec::new() };
        r.push(format!("command: {command}"));
        r.push(format!("dimension: {}", scenario.n));
        r.push(format!(
            "states: u_gamma1 = {}, u_gamma2 = {}",
            scenario.u_gamma1, scenario.u_gamma2
        ));
        r.push("implementation notes:".to_string());
        r.push(
            "  - the characteristic-map jacobian is evaluated as J = 1 + t*sum_i f_i''(u0)*du0/dx0_i; \
             the leading unit term makes J(0) = 1 for the identity map and J(1/K) = 0 on bundle data"
                .to_string(),
        );
        r.push(
            "  - absolute-nonstability limits use the same directional sampling as the stability \
             inequality with the reversed sign"
                .to_string(),
        );
        r.push(
            "  - the level-surface gap identity is evaluated on the Gamma2-anchored advected \
             surface, where psi2 = t; the Gamma1-anchored gap is measured without a closed form"
                .to_string(),
        );
        if scenario.u_gamma1 < scenario.u_gamma2 {
            r.push(
                "  - boundary states relabeled internally (u_gamma1 < u_gamma2): the bundle \
                 anchors at gamma2"
                    .to_string(),
            );
        }
        r
    }

    pub fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn write(&self, out_dir: &Path) -> std::io::Result<()> {
        let mut text = String::new();
        for line in &self.lines {
            writeln!(text, "{line}").expect("string write");
        }
        std::fs::write(out_dir.join("report.txt"), text)
    }
}

fn ensure_out_dir(opts: &RunOptions) -> Result<(), RunError> {
    std::fs::create_dir_all(&opts.out_dir)?;
    Ok(())
}

/// Writes the report with the failure appended, then returns the error.
fn fail(report: &mut Report, opts: &RunOptions, err: RunError) -> RunError {
    report.push(format!("FAILED: {err}"));
    let _ = report.write(&opts.out_dir);
    err
}

fn require_band(scenario: &Scenario) -> Result<(&Surface, &Surface), RunError> {
    match (&scenario.gamma1, &scenario.gamma2) {
        (Some(g1), Some(g2)) => Ok((g1, g2)),
        _ => Err(RunError::Validation(
            "this command needs gamma1 and gamma2 in the scenario".into(),
        )),
    }
}

pub fn build_bundle(scenario: &Scenario) -> Result<ProfileBundle, RunError> {
    let (g1, g2) = require_band(scenario)?;
    ProfileBundle::build(
        scenario.flux.clone(),
        g1.clone(),
        g2.clone(),
        scenario.u_gamma1,
        scenario.u_gamma2,
        scenario.s_samples,
    )
    .map_err(|e| match e {
        CoreError::RayMiss { ref s } => {
            let which = if scenario.u_gamma1 < scenario.u_gamma2 {
                "gamma1"
            } else {
                "gamma2"
            };
            RunError::Numerical(CoreError::InvalidInput(format!(
                "ray misses {which} at s = {s:?}: the profile problem has no solution \
                 for this configuration"
            )))
        }
        other => RunError::from(other),
    })
}

fn bundle_columns(bundle: &ProfileBundle) -> Vec<String> {
    let pd = bundle.start_surface().param_dim();
    let n = bundle.flux().dim();
    let mut cols: Vec<String> = (1..=pd).map(|i| format!("s{i}")).collect();
    cols.push("K".into());
    cols.push("tau0".into());
    cols.extend((1..=n).map(|i| format!("end_x{i}")));
    cols
}

fn dump_bundle(bundle: &ProfileBundle, path: &Path) -> std::io::Result<()> {
    let cols = bundle_columns(bundle);
    let header: Vec<&str> = cols.iter().map(String::as_str).collect();
    let rows = bundle
        .s_samples()
        .iter()
        .zip(bundle.k_table().iter().zip(bundle.tau0_table()))
        .zip(bundle.endpoints())
        .map(|((s, (k, tau0)), end)| {
            let mut row: Vec<Cell> = s.iter().map(|v| Cell::F(*v)).collect();
            row.push(Cell::F(*k));
            row.push(Cell::F(*tau0));
            row.extend(end.iter().map(|v| Cell::F(*v)));
            row
        });
    write_csv(path, &header, rows)
}

/// Uniform cell-center grid over the window (row-major, first axis fastest).
pub fn grid_over(window: &[(f64, f64)], per_axis: usize) -> Vec<Vec<f64>> {
    let dim = window.len();
    let mut grid = Vec::with_capacity(per_axis.pow(dim as u32));
    let coord = |axis: usize, i: usize| {
        let (lo, hi) = window[axis];
        lo + (hi - lo) * (i as f64 + 0.5) / per_axis as f64
    };
    match dim {
        1 => {
            for i in 0..per_axis {
                grid.push(vec![coord(0, i)]);
            }
        }
        2 => {
            for j in 0..per_axis {
                for i in 0..per_axis {
                    grid.push(vec![coord(0, i), coord(1, j)]);
                }
            }
        }
        _ => {
            for k in 0..per_axis {
                for j in 0..per_axis {
                    for i in 0..per_axis {
                        grid.push(vec![coord(0, i), coord(1, j), coord(2, k)]);
                    }
                }
            }
        }
    }
    grid
}

fn point_header(n: usize, extra: &[&str]) -> Vec<String> {
    let mut cols: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    cols.extend(extra.iter().map(|s| s.to_string()));
    cols
}

/// `construct`: solve the bundle, dump K/τ₀ tables and the initial field.
pub fn construct(scenario: &Scenario, opts: &RunOptions) -> Result<(), RunError> {
    ensure_out_dir(opts)?;
    let mut report = Report::new("construct", scenario);
    let bundle = match build_bundle(scenario) {
        Ok(b) => b,
        Err(e) => return Err(fail(&mut report, opts, e)),
    };
    dump_bundle(&bundle, &opts.out_dir.join("bundle.csv"))?;

    let ks = bundle.k_table();
    let (kmin, kmax) = ks
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| {
            (lo.min(*k), hi.max(*k))
        });
    report.push(format!("bundle: {} trajectories, K in [{kmin}, {kmax}]", ks.len()));
    if bundle.relabeled() {
        report.push("bundle anchored at gamma2 (states relabeled)".to_string());
    }
    // transverse sensitivity of K across the grid (finite differences);
    // reported, not constrained
    if ks.len() >= 2 && bundle.start_surface().param_dim() == 1 {
        let (lo, hi) = bundle.start_surface().param_box()[0];
        let ds = (hi - lo) / (ks.len() - 1) as f64;
        let mut dk_max = 0.0f64;
        for w in ks.windows(2) {
            dk_max = dk_max.max((w[1] - w[0]).abs() / ds);
        }
        report.push(format!("max |dK/ds| across the grid: {dk_max}"));
    }

    let field = PiecewiseField::new(&bundle);
    let res = opts.resolution(scenario);
    let cols = point_header(scenario.n, &["u1", "region"]);
    let header: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    let mut unresolved = 0usize;
    for x in grid_over(&scenario.window, res) {
        match field.classify_eval(&x) {
            Ok((region, u)) => {
                let mut row: Vec<Cell> = x.iter().map(|v| Cell::F(*v)).collect();
                row.push(Cell::F(u));
                row.push(Cell::S(region.tag().to_string()));
                rows.push(row);
            }
            Err(CoreError::AmbiguousRegion) => {
                return Err(fail(
                    &mut report,
                    opts,
                    RunError::Numerical(CoreError::AmbiguousRegion),
                ))
            }
            Err(_) => unresolved += 1,
        }
    }
    write_csv(opts.out_dir.join("u1_field.csv"), &header, rows)?;
    report.push(format!(
        "u1 field: {res}^{} grid, {unresolved} unresolved lateral points",
        scenario.n
    ));
    report.write(&opts.out_dir)?;
    Ok(())
}

/// `evolve-char`: breaking times, focus envelope, propagated fronts.
pub fn evolve_char(scenario: &Scenario, opts: &RunOptions) -> Result<(), RunError> {
    ensure_out_dir(opts)?;
    let mut report = Report::new("evolve-char", scenario);
    let bundle = match build_bundle(scenario) {
        Ok(b) => b,
        Err(e) => return Err(fail(&mut report, opts, e)),
    };

    let pd = bundle.start_surface().param_dim();
    let n = scenario.n;
    let mut cols: Vec<String> = (1..=pd).map(|i| format!("s{i}")).collect();
    cols.push("t0".into());
    cols.extend((1..=n).map(|i| format!("xstar{i}")));
    let header: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    for s in bundle.s_samples() {
        let t0 = breaking_time(&bundle, s).map_err(|e| fail(&mut report, opts, e.into()))?;
        let xs = focus_point(&bundle, s).map_err(|e| fail(&mut report, opts, e.into()))?;
        let mut row: Vec<Cell> = s.iter().map(|v| Cell::F(*v)).collect();
        row.push(Cell::F(t0));
        row.extend(xs.iter().map(|v| Cell::F(*v)));
        rows.push(row);
    }
    write_csv(opts.out_dir.join("breaking.csv"), &header, rows)?;

    let envelope = FrontPolyline::focus_envelope(&bundle)
        .map_err(|e| fail(&mut report, opts, e.into()))?;
    dump_front(&envelope, &opts.out_dir.join("envelope.csv"))?;
    report.push(format!(
        "formation completes at t = {} ({} envelope points)",
        envelope.time,
        envelope.points.len()
    ));

    let dt = opts.front_dt.unwrap_or(1e-3);
    for t in opts.times(scenario) {
        if t < envelope.time {
            report.push(format!(
                "t = {t}: before formation completes; no front written"
            ));
            continue;
        }
        let front = propagate_front(&envelope, bundle.flux(), t, dt)
            .map_err(|e| fail(&mut report, opts, e.into()))?;
        dump_front(&front, &opts.out_dir.join(format!("front_t{}.csv", time_tag(t))))?;
        report.push(format!("t = {t}: front written ({} points)", front.points.len()));
    }

    dump_trajectories(&bundle, &opts.times(scenario), &opts.out_dir.join("trajectories.csv"))
        .map_err(|e| fail(&mut report, opts, e))?;
    dump_level_surfaces(&bundle, &opts.times(scenario), &opts.out_dir.join("level.csv"))
        .map_err(|e| fail(&mut report, opts, e))?;
    report.write(&opts.out_dir)?;
    Ok(())
}

/// Characteristic paths from the bundle samples: launch coordinates
/// (s, τ), observation time t, position, and the carried state.
fn dump_trajectories(
    bundle: &ProfileBundle,
    times: &[f64],
    path: &Path,
) -> Result<(), RunError> {
    use shockform_core::characteristics::advect;
    let pd = bundle.start_surface().param_dim();
    let n = bundle.flux().dim();
    let mut cols: Vec<String> = (1..=pd).map(|i| format!("s{i}")).collect();
    cols.push("tau".into());
    cols.push("t".into());
    cols.extend((1..=n).map(|i| format!("x{i}")));
    cols.push("u".into());
    let header: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut all_times = vec![0.0];
    all_times.extend_from_slice(times);
    let mut rows = Vec::new();
    for s in bundle.s_samples() {
        let traj = bundle.trajectory(s)?;
        for j in 0..5 {
            let tau = traj.tau0 * j as f64 / 4.0;
            let (x0, u) = bundle.point_on_trajectory(&traj, tau);
            for &t in &all_times {
                let x = advect(bundle.flux(), &x0, u, t);
                let mut row: Vec<Cell> = s.iter().map(|v| Cell::F(*v)).collect();
                row.push(Cell::F(tau));
                row.push(Cell::F(t));
                row.extend(x.iter().map(|v| Cell::F(*v)));
                row.push(Cell::F(u));
                rows.push(row);
            }
        }
    }
    write_csv(path, &header, rows)?;
    Ok(())
}

/// Level-surface gap table over the s-grid and the requested times.
fn dump_level_surfaces(
    bundle: &ProfileBundle,
    times: &[f64],
    path: &Path,
) -> Result<(), RunError> {
    let pd = bundle.start_surface().param_dim();
    let n = bundle.flux().dim();
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=pd).map(|i| format!("s{i}")));
    cols.extend((1..=n).map(|i| format!("x{i}")));
    cols.extend(["psi1", "psi2", "gap_measured", "gap_formula"].map(String::from));
    let header: Vec<&str> = cols.iter().map(String::as_str).collect();
    let rows = psi_gap_rows(bundle, times)?;
    write_csv(path, &header, rows)?;
    Ok(())
}

fn dump_front(front: &FrontPolyline, path: &Path) -> std::io::Result<()> {
    let n = front.points[0].len();
    let mut cols = vec!["time".to_string()];
    cols.extend((1..=n).map(|i| format!("x{i}")));
    cols.extend((1..=n).map(|i| format!("n{i}")));
    let header: Vec<&str> = cols.iter().map(String::as_str).collect();
    let rows = front.points.iter().zip(&front.normals).map(|(p, nv)| {
        let mut row = vec![Cell::F(front.time)];
        row.extend(p.iter().map(|v| Cell::F(*v)));
        row.extend(nv.iter().map(|v| Cell::F(*v)));
        row
    });
    write_csv(path, &header, rows)
}

/// The initial field of the scenario: the composite bundle field when the
/// band surfaces are declared, the plain step across gamma0 otherwise.
enum InitialField<'a> {
    Band(PiecewiseField<'a>),
    Step(StepField<'a>),
}

impl Field for InitialField<'_> {
    fn eval(&self, x: &[f64]) -> shockform_core::Result<f64> {
        match self {
            InitialField::Band(f) => f.eval(x),
            InitialField::Step(f) => f.eval(x),
        }
    }
}

fn initial_field<'a>(
    scenario: &'a Scenario,
    bundle: Option<&'a ProfileBundle>,
) -> Result<InitialField<'a>, RunError> {
    if let Some(b) = bundle {
        return Ok(InitialField::Band(PiecewiseField::new(b)));
    }
    match &scenario.gamma0 {
        Some(g0) => Ok(InitialField::Step(StepField {
            surface: g0,
            behind: scenario.u_gamma1,
            ahead: scenario.u_gamma2,
        })),
        None => Err(RunError::Validation(
            "scenario has neither a band nor gamma0 to build initial data from".into(),
        )),
    }
}

fn dump_fvm(state: &fvm::FvmState, path: &Path) -> std::io::Result<()> {
    let dim = state.dim();
    let cols = point_header(dim, &["u"]);
    let header: Vec<&str> = cols.iter().map(String::as_str).collect();
    let nx = state.cells()[0];
    let ny = if dim == 2 { state.cells()[1] } else { 1 };
    let mut rows = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let idx: Vec<usize> = if dim == 1 { vec![ix] } else { vec![ix, iy] };
            let c = state.cell_center(&idx);
            let mut row: Vec<Cell> = c.iter().map(|v| Cell::F(*v)).collect();
            row.push(Cell::F(state.values()[iy * nx + ix]));
            rows.push(row);
        }
    }
    write_csv(path, &header, rows)
}

fn fvm_report_lines(report: &mut Report, state: &fvm::FvmState) {
    let d = &state.diag;
    report.push(format!(
        "fvm: {} steps to t = {}, mass residual max {}, range seen [{}, {}] (initial [{}, {}])",
        d.steps, state.time(), d.max_mass_residual, d.min_seen, d.max_seen,
        d.initial_range.0, d.initial_range.1
    ));
}

/// Warns when an extracted front sits within 10 cells of an outflow edge.
fn boundary_proximity(state: &fvm::FvmState, front: &FrontPolyline) -> Option<String> {
    let margin: Vec<f64> = state
        .spacing()
        .iter()
        .map(|h| h * shockform_core::defaults::FVM_FRONT_BOUNDARY_CELLS)
        .collect();
    for p in &front.points {
        for axis in 0..state.dim() {
            let (lo, hi) = state.window()[axis];
            if p[axis] - lo < margin[axis] || hi - p[axis] < margin[axis] {
                return Some(format!(
                    "warning: extracted front point {p:?} is within 10 cells of the window edge"
                ));
            }
        }
    }
    None
}

/// `evolve-fvm`: oracle run with field dumps at the requested times.
pub fn evolve_fvm(scenario: &Scenario, opts: &RunOptions) -> Result<(), RunError> {
    ensure_out_dir(opts)?;
    let mut report = Report::new("evolve-fvm", scenario);
    let bundle = match (&scenario.gamma1, &scenario.gamma2) {
        (Some(_), Some(_)) => Some(build_bundle(scenario).map_err(|e| fail(&mut report, opts, e))?),
        _ => None,
    };
    let field = initial_field(scenario, bundle.as_ref())
        .map_err(|e| fail(&mut report, opts, e))?;
    let res = opts.resolution(scenario);
    let resolution = vec![res; scenario.n];
    let mut state = fvm::init_grid(&scenario.window, &resolution, &field, scenario.boundary)
        .map_err(|e| fail(&mut report, opts, e.into()))?;
    dump_fvm(&state, &opts.out_dir.join(format!("fvm_t{}.csv", time_tag(0.0))))?;
    for t in opts.times(scenario) {
        if t <= state.time() {
            continue;
        }
        state = fvm::run_to(&state, &scenario.flux, t, scenario.cfl)
            .map_err(|e| fail(&mut report, opts, e.into()))?;
        dump_fvm(&state, &opts.out_dir.join(format!("fvm_t{}.csv", time_tag(t))))?;
        fvm_report_lines(&mut report, &state);
        if let Ok(front) = fvm::extract_front(&state, scenario.u_gamma1, scenario.u_gamma2) {
            if let Some(warning) = boundary_proximity(&state, &front) {
                report.push(warning);
            }
        }
    }
    report.write(&opts.out_dir)?;
    Ok(())
}

/// `compare`: L1 against the characteristic solution before breaking,
/// front distance against the propagated envelope after formation.
pub fn compare(scenario: &Scenario, opts: &RunOptions) -> Result<(), RunError> {
    ensure_out_dir(opts)?;
    let mut report = Report::new("compare", scenario);
    let bundle = match build_bundle(scenario) {
        Ok(b) => b,
        Err(e) => return Err(fail(&mut report, opts, e)),
    };
    let field = PiecewiseField::new(&bundle);
    let res = opts.resolution(scenario);
    let resolution = vec![res; scenario.n];
    let mut state = fvm::init_grid(&scenario.window, &resolution, &field, scenario.boundary)
        .map_err(|e| fail(&mut report, opts, e.into()))?;

    let t_break_first = bundle
        .k_table()
        .iter()
        .map(|k| 1.0 / k)
        .fold(f64::INFINITY, f64::min);
    let envelope = FrontPolyline::focus_envelope(&bundle)
        .map_err(|e| fail(&mut report, opts, e.into()))?;

    // boundary-influence speed for the interior column: information in
    // the explicit scheme moves at most max|f′|/cfl
    let mut alpha_max = 0.0f64;
    for k in 0..=64 {
        let u = bundle.u_end() + (bundle.u_start() - bundle.u_end()) * k as f64 / 64.0;
        for v in scenario.flux.eval(u, 1).map_err(|e| fail(&mut report, opts, e.into()))? {
            alpha_max = alpha_max.max(v.abs());
        }
    }

    let header = ["time", "cells", "l1_char", "l1_char_interior", "front_mean", "front_max"];
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    for t in opts.times(scenario) {
        if t > state.time() {
            state = fvm::run_to(&state, &scenario.flux, t, scenario.cfl)
                .map_err(|e| fail(&mut report, opts, e.into()))?;
        }
        let mut l1 = f64::NAN;
        let mut l1_interior = f64::NAN;
        let mut front_mean = f64::NAN;
        let mut front_max = f64::NAN;
        if t < t_break_first {
            let sol = CharSolution::new(&bundle, t)
                .map_err(|e| fail(&mut report, opts, e.into()))?;
            l1 = fvm::l1_distance(&state, &sol)
                .map_err(|e| fail(&mut report, opts, e.into()))?;
            let margin = t * alpha_max / scenario.cfl;
            let (trimmed, cells) = fvm::l1_distance_interior(&state, &sol, margin)
                .map_err(|e| fail(&mut report, opts, e.into()))?;
            if cells > 0 {
                l1_interior = trimmed;
            }
        } else if t >= envelope.time {
            let rh_front = propagate_front(&envelope, bundle.flux(), t, 1e-3)
                .map_err(|e| fail(&mut report, opts, e.into()))?;
            match fvm::extract_front(&state, scenario.u_gamma1, scenario.u_gamma2) {
                Ok(extracted) => {
                    let d = front_distances(&extracted, &rh_front);
                    if !d.is_empty() {
                        front_mean = d.iter().sum::<f64>() / d.len() as f64;
                        front_max = d.iter().cloned().fold(0.0, f64::max);
                    }
                }
                Err(e) => {
                    report.push(format!("t = {t}: front extraction failed: {e}"));
                }
            }
        } else {
            report.push(format!(
                "t = {t}: inside the mixed regime (between first and last breaking); \
                 only field dumps are defined there"
            ));
        }
        rows.push(vec![
            Cell::F(t),
            Cell::I(res as i64),
            Cell::F(l1),
            Cell::F(l1_interior),
            Cell::F(front_mean),
            Cell::F(front_max),
        ]);
    }
    write_csv(opts.out_dir.join("compare.csv"), &header, rows)?;
    fvm_report_lines(&mut report, &state);
    report.write(&opts.out_dir)?;
    Ok(())
}

/// Distances from extracted front points to the reference polyline,
/// counting only points that project onto the interior of a segment.
pub fn front_distances(extracted: &FrontPolyline, reference: &FrontPolyline) -> Vec<f64> {
    let mut out = Vec::new();
    if reference.points.len() == 1 {
        // 1-D fronts: plain point distance
        for p in &extracted.points {
            out.push(
                p.iter()
                    .zip(&reference.points[0])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt(),
            );
        }
        return out;
    }
    for p in &extracted.points {
        let mut best: Option<f64> = None;
        for seg in reference.points.windows(2) {
            let (a, b) = (&seg[0], &seg[1]);
            let mut len2 = 0.0;
            let mut dot = 0.0;
            for i in 0..p.len() {
                let e = b[i] - a[i];
                len2 += e * e;
                dot += (p[i] - a[i]) * e;
            }
            if len2 == 0.0 {
                continue;
            }
            let w = dot / len2;
            if !(0.0..=1.0).contains(&w) {
                continue;
            }
            let mut d2 = 0.0;
            for i in 0..p.len() {
                let proj = a[i] + w * (b[i] - a[i]);
                d2 += (p[i] - proj) * (p[i] - proj);
            }
            let d = d2.sqrt();
            best = Some(best.map_or(d, |v: f64| v.min(d)));
        }
        if let Some(d) = best {
            out.push(d);
        }
    }
    out
}

/// `stability`: jump verdicts on the declared front (gamma0 when present,
/// otherwise the formed-shock envelope).
pub fn stability(scenario: &Scenario, opts: &RunOptions) -> Result<(), RunError> {
    ensure_out_dir(opts)?;
    let mut report = Report::new("stability", scenario);
    let scale = scenario.window_diagonal();
    // On a declared gamma0 the step is the scenario's own (u_gamma1 behind
    // the g < 0 side); on a formed front the larger state is always behind.
    let (surface, label, behind, ahead) = match &scenario.gamma0 {
        Some(g0) => (g0.clone(), "gamma0", scenario.u_gamma1, scenario.u_gamma2),
        None => {
            let bundle = match build_bundle(scenario) {
                Ok(b) => b,
                Err(e) => return Err(fail(&mut report, opts, e)),
            };
            let envelope = FrontPolyline::focus_envelope(&bundle)
                .map_err(|e| fail(&mut report, opts, e.into()))?;
            let s = envelope_surface(&bundle, &envelope)
                .map_err(|e| fail(&mut report, opts, e))?;
            (s, "formed front", bundle.u_start(), bundle.u_end())
        }
    };
    report.push(format!("classifying the jump across the {label}"));

    let field = StepField {
        surface: &surface,
        behind,
        ahead,
    };
    let header_cols = point_header(scenario.n, &["u_plus", "u_minus", "difference", "classification"]);
    let header: Vec<&str> = header_cols.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    for s in surface.sample_params(scenario.s_samples.min(33)) {
        let x = surface
            .point(&s)
            .map_err(|e| fail(&mut report, opts, e.into()))?;
        let verdict = classify_jump(&field, &scenario.flux, &x, behind, ahead, scale)
            .map_err(|e| fail(&mut report, opts, e.into()))?;
        let mut row: Vec<Cell> = x.iter().map(|v| Cell::F(*v)).collect();
        row.push(Cell::F(verdict.u_plus));
        row.push(Cell::F(verdict.u_minus));
        row.push(Cell::F(verdict.difference));
        row.push(Cell::S(verdict.class.tag().to_string()));
        rows.push(row);
    }
    write_csv(opts.out_dir.join("verdicts.csv"), &header, rows)?;
    report.write(&opts.out_dir)?;
    Ok(())
}

/// The focus envelope as a Surface (hyperplane point in 1-D, polyline in 2-D).
pub fn envelope_surface(bundle: &ProfileBundle, envelope: &FrontPolyline) -> Result<Surface, RunError> {
    match bundle.flux().dim() {
        1 => Surface::hyperplane(
            envelope.points[0].clone(),
            vec![],
            Some(envelope.normals[0].clone()),
            vec![],
        )
        .map_err(RunError::from),
        2 => {
            let params: Vec<f64> = bundle.s_samples().iter().map(|s| s[0]).collect();
            let surface = Surface::polyline(params.clone(), envelope.points.clone())?;
            // The step's ahead side (where the normals point) must read
            // g > 0; flip the travel direction otherwise.
            let h = 1e-3 * envelope.min_segment_length().max(1e-6);
            let probe: Vec<f64> = envelope.points[0]
                .iter()
                .zip(&envelope.normals[0])
                .map(|(p, n)| p + h * n)
                .collect();
            if surface.implicit(&probe) < 0.0 {
                let mut pts = envelope.points.clone();
                pts.reverse();
                let flipped: Vec<f64> = params.iter().rev().map(|v| -v).collect();
                Surface::polyline(flipped, pts).map_err(RunError::from)
            } else {
                Ok(surface)
            }
        }
        _ => Err(RunError::Validation(
            "formed-front classification is supported in dimensions 1 and 2; \
             declare gamma0 for higher dimensions"
                .into(),
        )),
    }
}

/// `decay`: fan construction, horizon report, field dumps.
pub fn decay(scenario: &Scenario, opts: &RunOptions) -> Result<(), RunError> {
    ensure_out_dir(opts)?;
    let mut report = Report::new("decay", scenario);
    let Some(g0) = scenario.gamma0.clone() else {
        return Err(fail(
            &mut report,
            opts,
            RunError::Validation("decay needs gamma0 in the scenario".into()),
        ));
    };
    let fan_opts = FanOptions {
        s_per_axis: scenario.s_samples.min(33),
        v_samples: shockform_core::defaults::FAN_V_SAMPLES,
        window: scenario.window.clone(),
    };
    let fan = build_fan(
        g0,
        scenario.flux.clone(),
        scenario.u_gamma1,
        scenario.u_gamma2,
        &fan_opts,
    )
    .map_err(|e| fail(&mut report, opts, e.into()))?;
    report.push(format!(
        "fan horizon t_bar = {}{}",
        fan.t_bar(),
        if fan.t_bar_capped() {
            " (injective up to the cap)"
        } else {
            " (sampled injectivity loss)"
        }
    ));
    match fan.window_exit() {
        Some(t) => report.push(format!("fan wedge leaves the window at t = {t}")),
        None => report.push("fan wedge never leaves the window".to_string()),
    }

    let res = opts.resolution(scenario);
    let cols = point_header(scenario.n, &["t", "u", "region"]);
    let header: Vec<&str> = cols.iter().map(String::as_str).collect();
    for t in opts.times(scenario) {
        if !(t > 0.0) || t > fan.t_bar() {
            report.push(format!("t = {t}: outside (0, t_bar]; no dump written"));
            continue;
        }
        let slice = fan.at_time(t).map_err(|e| fail(&mut report, opts, e.into()))?;
        let mut rows = Vec::new();
        for x in grid_over(&scenario.window, res) {
            let region = slice
                .region(&x)
                .map_err(|e| fail(&mut report, opts, e.into()))?;
            let u = slice
                .eval(&x)
                .map_err(|e| fail(&mut report, opts, e.into()))?;
            let mut row: Vec<Cell> = x.iter().map(|v| Cell::F(*v)).collect();
            row.push(Cell::F(t));
            row.push(Cell::F(u));
            row.push(Cell::S(region.tag().to_string()));
            rows.push(row);
        }
        write_csv(
            opts.out_dir.join(format!("fan_t{}.csv", time_tag(t))),
            &header,
            rows,
        )?;
        report.push(format!("t = {t}: fan field written"));
    }
    report.write(&opts.out_dir)?;
    Ok(())
}

/// `verify` lives in the sibling module; re-exported here for the binary.
pub use crate::verify::verify;

/// Gap-identity rows for the level-surface dump (used by verify).
pub fn psi_gap_rows(
    bundle: &ProfileBundle,
    times: &[f64],
) -> Result<Vec<Vec<Cell>>, CoreError> {
    let mut rows = Vec::new();
    for s in bundle.s_samples() {
        for &t in times {
            let gap = psi_gap(bundle, s, t)?;
            let mut row: Vec<Cell> = vec![Cell::F(t)];
            row.extend(s.iter().map(|v| Cell::F(*v)));
            row.extend(gap.x.iter().map(|v| Cell::F(*v)));
            row.push(Cell::F(gap.psi1));
            row.push(Cell::F(gap.psi2));
            row.push(Cell::F(gap.measured));
            row.push(Cell::F(gap.formula));
            rows.push(row);
        }
    }
    Ok(rows)
}
