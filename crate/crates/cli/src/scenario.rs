//! Scenario configuration: one TOML document per run, validated into the
//! core types with every violation reported, not just the first.

use std::path::Path;

use serde::Deserialize;
use shockform_core::flux::FluxModel;
use shockform_core::fvm::Boundary;
use shockform_core::geometry::Surface;

/// Parse failure: either malformed TOML (with position) or a list of
/// semantic violations.
#[derive(Debug)]
pub enum ScenarioError {
    Syntax(String),
    Invalid(Vec<String>),
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioError::Syntax(msg) => write!(f, "scenario syntax error: {msg}"),
            ScenarioError::Invalid(list) => {
                writeln!(f, "scenario validation failed:")?;
                for item in list {
                    writeln!(f, "  - {item}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    n: usize,
    flux: FluxDoc,
    states: StatesDoc,
    gamma1: Option<SurfaceDoc>,
    gamma2: Option<SurfaceDoc>,
    gamma0: Option<SurfaceDoc>,
    domain: DomainDoc,
    #[serde(default)]
    fvm: FvmDoc,
    #[serde(default)]
    output: OutputDoc,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FluxDoc {
    kind: String,
    a: Option<Vec<f64>>,
    coeffs: Option<Vec<Vec<f64>>>,
    working_interval: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatesDoc {
    u_gamma1: f64,
    u_gamma2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceDoc {
    family: String,
    point: Option<Vec<f64>>,
    spanning: Option<Vec<Vec<f64>>>,
    normal: Option<Vec<f64>>,
    center: Option<Vec<f64>>,
    radius: Option<f64>,
    negative_inside: Option<bool>,
    params: Option<Vec<f64>>,
    points: Option<Vec<Vec<f64>>>,
    file: Option<String>,
    s_box: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainDoc {
    window: Vec<[f64; 2]>,
    s_samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FvmDoc {
    resolution: Option<usize>,
    cfl: Option<f64>,
    boundary: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputDoc {
    times: Option<Vec<f64>>,
}

/// Fully validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub n: usize,
    pub flux: FluxModel,
    pub gamma1: Option<Surface>,
    pub gamma2: Option<Surface>,
    pub gamma0: Option<Surface>,
    pub u_gamma1: f64,
    pub u_gamma2: f64,
    pub window: Vec<(f64, f64)>,
    pub s_samples: usize,
    pub fvm_resolution: usize,
    pub cfl: f64,
    pub boundary: Boundary,
    pub times: Vec<f64>,
}

impl Scenario {
    /// Diagonal of the evaluation window (the ε-sequence scale).
    pub fn window_diagonal(&self) -> f64 {
        self.window
            .iter()
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    pub fn resolution_per_axis(&self) -> Vec<usize> {
        vec![self.fvm_resolution; self.n]
    }
}

fn build_surface(
    doc: &SurfaceDoc,
    n: usize,
    name: &str,
    base_dir: &Path,
    errors: &mut Vec<String>,
) -> Option<Surface> {
    let result = match doc.family.as_str() {
        "hyperplane" => {
            let point = doc.point.clone().unwrap_or_default();
            let spanning = doc.spanning.clone().unwrap_or_default();
            let s_box: Vec<(f64, f64)> = doc
                .s_box
                .clone()
                .unwrap_or_default()
                .into_iter()
                .map(|[lo, hi]| (lo, hi))
                .collect();
            if point.len() != n {
                errors.push(format!("{name}: hyperplane point must have {n} components"));
                return None;
            }
            Surface::hyperplane(point, spanning, doc.normal.clone(), s_box)
        }
        "circle" => {
            let center = doc.center.clone().unwrap_or_default();
            let radius = doc.radius.unwrap_or(0.0);
            let s_box: Vec<(f64, f64)> = doc
                .s_box
                .clone()
                .map(|v| v.into_iter().map(|[lo, hi]| (lo, hi)).collect())
                .unwrap_or_else(|| vec![(0.0, std::f64::consts::TAU)]);
            Surface::circle(center, radius, doc.negative_inside.unwrap_or(true), s_box)
        }
        "polyline" => {
            let table = if let Some(file) = &doc.file {
                match read_sample_table(&base_dir.join(file)) {
                    Ok(t) => Some(t),
                    Err(e) => {
                        errors.push(format!("{name}: cannot read sample table: {e}"));
                        return None;
                    }
                }
            } else {
                doc.params.clone().zip(doc.points.clone())
            };
            match table {
                Some((params, points)) => Surface::polyline(params, points),
                None => {
                    errors.push(format!(
                        "{name}: polyline needs either `file` or `params` + `points`"
                    ));
                    return None;
                }
            }
        }
        other => {
            errors.push(format!(
                "{name}: unknown surface family `{other}` (hyperplane, circle, polyline)"
            ));
            return None;
        }
    };
    match result {
        Ok(s) => {
            if s.ambient_dim() != n {
                errors.push(format!("{name}: surface dimension disagrees with n = {n}"));
                return None;
            }
            if let Err(e) = s.consistency_check(9) {
                errors.push(format!("{name}: {e}"));
                return None;
            }
            Some(s)
        }
        Err(e) => {
            errors.push(format!("{name}: {e}"));
            None
        }
    }
}

/// CSV sample table: header line, then rows `s,x1[,x2]`.
fn read_sample_table(path: &Path) -> std::io::Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut params = Vec::new();
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        if cells.len() < 2 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                "sample table rows need s plus point components",
            ));
        }
        params.push(cells[0]);
        points.push(cells[1..].to_vec());
    }
    Ok((params, points))
}

/// Parse and validate a scenario document. `base_dir` anchors relative
/// sample-table paths.
pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc =
        toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
    let mut errors = Vec::new();

    let n = doc.n;
    if n == 0 || n > 3 {
        errors.push(format!("n = {n} outside the supported range 1..=3"));
    }

    let u1 = doc.states.u_gamma1;
    let u2 = doc.states.u_gamma2;
    if u1 == u2 {
        errors.push("states are equal: u_gamma1 must differ from u_gamma2".into());
    }
    if !u1.is_finite() || !u2.is_finite() {
        errors.push("states must be finite".into());
    }

    let default_interval = (u1.min(u2) - 1.0, u1.max(u2) + 1.0);
    let interval = doc
        .flux
        .working_interval
        .map(|[lo, hi]| (lo, hi))
        .unwrap_or(default_interval);
    let flux = match doc.flux.kind.as_str() {
        "quadratic" => FluxModel::quadratic(doc.flux.a.clone().unwrap_or_default(), interval),
        "exponential" => FluxModel::exponential(doc.flux.a.clone().unwrap_or_default(), interval),
        "polynomial" => {
            FluxModel::polynomial(doc.flux.coeffs.clone().unwrap_or_default(), interval)
        }
        other => {
            errors.push(format!(
                "unknown flux kind `{other}` (quadratic, polynomial, exponential)"
            ));
            FluxModel::quadratic(vec![1.0; n.max(1)], (0.0, 1.0))
        }
    };
    let flux = match flux {
        Ok(f) => {
            if f.dim() != n && n >= 1 && n <= 3 {
                errors.push(format!(
                    "flux has {} components, scenario declares n = {n}",
                    f.dim()
                ));
            }
            Some(f)
        }
        Err(e) => {
            errors.push(format!("flux: {e}"));
            None
        }
    };

    let gamma1 = doc
        .gamma1
        .as_ref()
        .and_then(|d| build_surface(d, n, "gamma1", base_dir, &mut errors));
    let gamma2 = doc
        .gamma2
        .as_ref()
        .and_then(|d| build_surface(d, n, "gamma2", base_dir, &mut errors));
    let gamma0 = doc
        .gamma0
        .as_ref()
        .and_then(|d| build_surface(d, n, "gamma0", base_dir, &mut errors));
    if doc.gamma1.is_none() && doc.gamma0.is_none() {
        errors.push("scenario declares neither gamma1/gamma2 nor gamma0".into());
    }
    if doc.gamma1.is_some() != doc.gamma2.is_some() {
        errors.push("gamma1 and gamma2 must be declared together".into());
    }

    let window: Vec<(f64, f64)> = doc.domain.window.iter().map(|[lo, hi]| (*lo, *hi)).collect();
    if window.len() != n {
        errors.push(format!(
            "window has {} axes, scenario declares n = {n}",
            window.len()
        ));
    }
    for (lo, hi) in &window {
        if !(lo < hi) {
            errors.push(format!("window axis [{lo}, {hi}] is empty or inverted"));
        }
    }

    let s_samples = doc
        .domain
        .s_samples
        .unwrap_or(shockform_core::defaults::S_SAMPLES_DEFAULT);
    if s_samples < 2 && n > 1 {
        errors.push("s_samples must be at least 2".into());
    }

    let fvm_resolution = doc.fvm.resolution.unwrap_or(64);
    if fvm_resolution < 8 {
        errors.push("fvm resolution must be at least 8 cells per axis".into());
    }
    let cfl = doc.fvm.cfl.unwrap_or(shockform_core::defaults::FVM_CFL);
    if !(cfl > 0.0 && cfl <= 1.0) {
        errors.push(format!("cfl = {cfl} outside (0, 1]"));
    }
    let boundary = match doc.fvm.boundary.as_deref() {
        None | Some("outflow") => Boundary::Outflow,
        Some("periodic") => Boundary::Periodic,
        Some(other) => {
            errors.push(format!("unknown boundary `{other}` (outflow, periodic)"));
            Boundary::Outflow
        }
    };

    let times = doc.output.times.unwrap_or_default();
    for t in &times {
        if !(t.is_finite() && *t >= 0.0) {
            errors.push(format!("output time {t} must be finite and nonnegative"));
        }
    }

    if !errors.is_empty() {
        return Err(ScenarioError::Invalid(errors));
    }
    Ok(Scenario {
        n,
        flux: flux.expect("validated"),
        gamma1,
        gamma2,
        gamma0,
        u_gamma1: u1,
        u_gamma2: u2,
        window,
        s_samples,
        fvm_resolution,
        cfl,
        boundary,
        times,
    })
}

/// Read a scenario file; relative sample tables resolve next to it.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Syntax(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SCENARIO_A: &str = r#"
n = 2

[flux]
kind = "quadratic"
a = [1.0, 1.0]

[states]
u_gamma1 = 2.0
u_gamma2 = 1.0

[gamma1]
family = "hyperplane"
point = [0.0, 0.0]
spanning = [[1.0, -1.0]]
normal = [1.0, 1.0]
s_box = [[-2.0, 2.0]]

[gamma2]
family = "hyperplane"
point = [1.0, 1.0]
spanning = [[1.0, -1.0]]
normal = [1.0, 1.0]
s_box = [[-2.0, 2.0]]

[domain]
window = [[-3.0, 5.0], [-3.0, 5.0]]
s_samples = 33

[output]
times = [0.5, 1.5]
"#;

    #[test]
    fn scenario_a_round_trip() {
        let s = parse_scenario(SCENARIO_A, Path::new(".")).unwrap();
        assert_eq!(s.n, 2);
        assert_eq!(s.s_samples, 33);
        assert_eq!(s.fvm_resolution, 64);
        assert_eq!(s.u_gamma1, 2.0);
        let g1 = s.gamma1.as_ref().unwrap();
        assert_eq!(g1.point(&[1.0]).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn equal_states_are_reported() {
        let text = SCENARIO_A.replace("u_gamma2 = 1.0", "u_gamma2 = 2.0");
        match parse_scenario(&text, Path::new(".")) {
            Err(ScenarioError::Invalid(list)) => {
                assert!(list.iter().any(|e| e.contains("states are equal")), "{list:?}");
            }
            other => panic!("expected invalid, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_is_a_syntax_error() {
        assert!(matches!(
            parse_scenario("", Path::new(".")),
            Err(ScenarioError::Syntax(_))
        ));
    }

    #[test]
    fn multiple_violations_all_reported() {
        let text = SCENARIO_A
            .replace("u_gamma2 = 1.0", "u_gamma2 = 2.0")
            .replace("window = [[-3.0, 5.0], [-3.0, 5.0]]", "window = [[5.0, -3.0], [-3.0, 5.0]]");
        match parse_scenario(&text, Path::new(".")) {
            Err(ScenarioError::Invalid(list)) => {
                assert!(list.len() >= 2, "{list:?}");
            }
            other => panic!("expected invalid, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_scenario("n = [broken", Path::new(".")).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn circle_surface_family() {
        let text = SCENARIO_A.replace(
            "[gamma1]\nfamily = \"hyperplane\"\npoint = [0.0, 0.0]\nspanning = [[1.0, -1.0]]\nnormal = [1.0, 1.0]\ns_box = [[-2.0, 2.0]]",
            "[gamma1]\nfamily = \"circle\"\ncenter = [-2.0, -2.0]\nradius = 1.0\ns_box = [[0.0, 1.5]]",
        );
        let s = parse_scenario(&text, Path::new(".")).unwrap();
        let g1 = s.gamma1.as_ref().unwrap();
        let p = g1.point(&[0.0]).unwrap();
        assert!((p[0] + 1.0).abs() < 1e-12 && (p[1] + 2.0).abs() < 1e-12);
        assert!(g1.implicit(&[-2.0, -2.0]) < 0.0);
    }

    #[test]
    fn unknown_fields_are_syntax_errors() {
        let text = format!("{SCENARIO_A}\n[nonexistent]\nfoo = 1\n");
        assert!(matches!(
            parse_scenario(&text, Path::new(".")),
            Err(ScenarioError::Syntax(_))
        ));
    }
}
