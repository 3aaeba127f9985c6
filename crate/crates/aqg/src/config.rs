//! Experiment configuration: a single JSON document with six optional
//! sections. Every key has a documented default, so `{}` is a valid document;
//! unknown keys are rejected by name and all violations are reported at once.
//!
//! ```json
//! {
//!   "grid":              {"n1": 64, "n2": 64, "l1": 100.53, "l2": 100.53},
//!   "params":            {"mu": 1.0, "nu": 1.0, "alpha": 0.75, "beta": 0.75},
//!   "solver":            {"dt": 0.01, "t_end": 10.0, "integrator": "if_rk4",
//!                         "cfl_safety": 0.5, "diagnostics_every": 10,
//!                         "nonlinear": true, "budget_rel_tol": 1e-6},
//!   "diagnostics":       {"s_diag": [2], "p_diag": [2, 4, 8],
//!                         "delta_list": [8, 4, 2, 1]},
//!   "initial_condition": {"kind": "single_mode", "k": [1, 0], "amplitude": 1.0},
//!   "output":            {"directory": "aqg-out", "formats": ["ndjson"]}
//! }
//! ```
//!
//! Split cutoffs in `delta_list` are multiples of the fundamental wavenumber
//! `2π/max(l1,l2)`. A `(alpha, beta)` pair below the decay-region threshold
//! parses fine but earns a warning carrying the margin.

use std::path::PathBuf;
use std::sync::Arc;

use serde_json::{Map, Value};

use crate::dynamics::{classify_region, DissipationParams, Integrator, SolverConfig};
use crate::error::{AqgError, Result};
use crate::grid::{Grid, DEFAULT_BOX_SIDE};
use crate::initial::InitialCondition;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridConfig {
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub l2: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n1: 64,
            n2: 64,
            l1: DEFAULT_BOX_SIDE,
            l2: DEFAULT_BOX_SIDE,
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<Arc<Grid>> {
        Grid::new(self.n1, self.n2, self.l1, self.l2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Ndjson,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// `records.ndjson` is always written; `Csv` adds a converted copy.
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("aqg-out"),
            formats: vec![OutputFormat::Ndjson],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub params: DissipationParams,
    pub solver: SolverConfig,
    pub initial_condition: InitialCondition,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridConfig::default(),
            params: DissipationParams::new(1.0, 1.0, 0.75, 0.75)
                .expect("default orders are valid"),
            solver: SolverConfig::default(),
            initial_condition: InitialCondition::SingleMode {
                k: (1, 0),
                amplitude: 1.0,
            },
            output: OutputConfig::default(),
        }
    }
}

/// A parsed config plus non-fatal warnings (currently: the decay-region
/// condition not holding).
#[derive(Clone, Debug)]
pub struct ParsedConfig {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

// --- typed extraction with path-qualified complaints ------------------------

struct Section<'a> {
    path: &'static str,
    map: Map<String, Value>,
    violations: &'a mut Vec<String>,
}

impl<'a> Section<'a> {
    fn new(
        doc: &mut Map<String, Value>,
        path: &'static str,
        violations: &'a mut Vec<String>,
    ) -> Self {
        let map = match doc.remove(path) {
            None => Map::new(),
            Some(Value::Object(map)) => map,
            Some(other) => {
                violations.push(format!(
                    "{path} must be an object, got {}",
                    kind_name(&other)
                ));
                Map::new()
            }
        };
        Section {
            path,
            map,
            violations,
        }
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.map.remove(key)
    }

    fn complain(&mut self, key: &str, expected: &str, got: &Value) {
        self.violations.push(format!(
            "{}.{key} must be {expected}, got {}",
            self.path,
            kind_name(got)
        ));
    }

    fn f64(&mut self, key: &str, default: f64) -> f64 {
        match self.take(key) {
            None => default,
            Some(v) => match v.as_f64() {
                Some(x) => x,
                None => {
                    self.complain(key, "a number", &v);
                    default
                }
            },
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> usize {
        match self.take(key) {
            None => default,
            Some(v) => match v.as_u64() {
                Some(x) => x as usize,
                None => {
                    self.complain(key, "a nonnegative integer", &v);
                    default
                }
            },
        }
    }

    fn u64_opt(&mut self, key: &str) -> Option<u64> {
        match self.take(key) {
            None => None,
            Some(v) => match v.as_u64() {
                Some(x) => Some(x),
                None => {
                    self.complain(key, "a nonnegative integer", &v);
                    None
                }
            },
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> bool {
        match self.take(key) {
            None => default,
            Some(v) => match v.as_bool() {
                Some(x) => x,
                None => {
                    self.complain(key, "a boolean", &v);
                    default
                }
            },
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.take(key) {
            None => None,
            Some(v) => match v.as_str() {
                Some(s) => Some(s.to_owned()),
                None => {
                    self.complain(key, "a string", &v);
                    None
                }
            },
        }
    }

    fn f64_array(&mut self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.take(key) {
            None => default.to_vec(),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in &items {
                    match item.as_f64() {
                        Some(x) => out.push(x),
                        None => {
                            self.complain(key, "an array of numbers", item);
                            return default.to_vec();
                        }
                    }
                }
                out
            }
            Some(v) => {
                self.complain(key, "an array of numbers", &v);
                default.to_vec()
            }
        }
    }

    /// Call last: everything still present is an unknown key.
    fn finish(self) {
        for key in self.map.keys() {
            self.violations
                .push(format!("unknown key: {}.{key}", self.path));
        }
    }
}

fn kind_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

// --- section parsers ---------------------------------------------------------

fn parse_grid(doc: &mut Map<String, Value>, violations: &mut Vec<String>) -> GridConfig {
    let d = GridConfig::default();
    let mut s = Section::new(doc, "grid", violations);
    let grid = GridConfig {
        n1: s.usize("n1", d.n1),
        n2: s.usize("n2", d.n2),
        l1: s.f64("l1", d.l1),
        l2: s.f64("l2", d.l2),
    };
    s.finish();
    if let Err(e) = grid.build() {
        match e {
            AqgError::Config(list) => {
                violations.extend(list.into_iter().map(|m| format!("grid: {m}")))
            }
            other => violations.push(format!("grid: {other}")),
        }
    }
    grid
}

fn parse_params(
    doc: &mut Map<String, Value>,
    violations: &mut Vec<String>,
) -> DissipationParams {
    let mut s = Section::new(doc, "params", violations);
    let (mu, nu) = (s.f64("mu", 1.0), s.f64("nu", 1.0));
    let (alpha, beta) = (s.f64("alpha", 0.75), s.f64("beta", 0.75));
    s.finish();
    match DissipationParams::new(mu, nu, alpha, beta) {
        Ok(p) => p,
        Err(AqgError::Config(list)) => {
            violations.extend(list.into_iter().map(|m| format!("params: {m}")));
            DissipationParams::new(1.0, 1.0, 0.75, 0.75).expect("fallback is valid")
        }
        Err(e) => {
            violations.push(format!("params: {e}"));
            DissipationParams::new(1.0, 1.0, 0.75, 0.75).expect("fallback is valid")
        }
    }
}

fn parse_solver(doc: &mut Map<String, Value>, violations: &mut Vec<String>) -> SolverConfig {
    let d = SolverConfig::default();
    let mut solver_section = Section::new(doc, "solver", violations);
    let integrator = match solver_section.string("integrator") {
        None => d.integrator,
        Some(name) => match name.as_str() {
            "if_rk4" => Integrator::IfRk4,
            "if_euler" => Integrator::IfEuler,
            other => {
                solver_section.violations.push(format!(
                    "solver.integrator must be \"if_rk4\" or \"if_euler\", got \"{other}\""
                ));
                d.integrator
            }
        },
    };
    let dt = solver_section.f64("dt", d.dt);
    let t_end = solver_section.f64("t_end", d.t_end);
    let cfl_safety = solver_section.f64("cfl_safety", d.cfl_safety);
    let diagnostics_every = solver_section.usize("diagnostics_every", d.diagnostics_every);
    let nonlinear = solver_section.bool("nonlinear", d.nonlinear);
    let budget_rel_tol = solver_section.f64("budget_rel_tol", d.budget_rel_tol);
    solver_section.finish();

    let mut diag_section = Section::new(doc, "diagnostics", violations);
    let s_diag = diag_section.f64_array("s_diag", &d.s_diag);
    let p_diag = diag_section.f64_array("p_diag", &d.p_diag);
    let delta_list = diag_section.f64_array("delta_list", &d.delta_list);
    diag_section.finish();

    let config = SolverConfig {
        dt,
        t_end,
        integrator,
        cfl_safety,
        diagnostics_every,
        s_diag,
        p_diag,
        delta_list,
        nonlinear,
        budget_rel_tol,
    };
    match config.validate() {
        Ok(()) => {}
        Err(AqgError::Config(list)) => {
            violations.extend(list.into_iter().map(|m| format!("solver: {m}")));
        }
        Err(e) => violations.push(format!("solver: {e}")),
    }
    config
}

fn parse_initial(
    doc: &mut Map<String, Value>,
    grid: &GridConfig,
    violations: &mut Vec<String>,
) -> InitialCondition {
    let fallback = InitialCondition::SingleMode {
        k: (1, 0),
        amplitude: 1.0,
    };
    let mut s = Section::new(doc, "initial_condition", violations);
    let kind = s.string("kind").unwrap_or_else(|| "single_mode".into());
    let amplitude = s.f64("amplitude", 1.0);
    // Static band bookkeeping against the configured grid (2/3-rule box).
    let (d1, d2) = (grid.n1 as u64 / 3, grid.n2 as u64 / 3);
    let ic = match kind.as_str() {
        "single_mode" => {
            let k = match s.take("k") {
                None => Some((1i64, 0i64)),
                Some(Value::Array(items)) if items.len() == 2 => {
                    match (items[0].as_i64(), items[1].as_i64()) {
                        (Some(a), Some(b)) => Some((a, b)),
                        _ => {
                            s.violations.push(
                                "initial_condition.k must be a pair of integers".into(),
                            );
                            None
                        }
                    }
                }
                Some(v) => {
                    s.complain("k", "a pair of integers", &v);
                    None
                }
            };
            match k {
                Some((k1, k2)) => {
                    if (k1 == 0 && k2 == 0)
                        || k1.unsigned_abs() > d1
                        || k2.unsigned_abs() > d2
                    {
                        s.violations.push(format!(
                            "initial_condition.k = [{k1}, {k2}] must be nonzero and within \
                             the dealias box (|k1| <= {d1}, |k2| <= {d2})"
                        ));
                    }
                    InitialCondition::SingleMode {
                        k: (k1, k2),
                        amplitude,
                    }
                }
                None => fallback.clone(),
            }
        }
        "random_bandlimited" => {
            let gamma = s.f64("gamma", 2.0);
            let band_top = d1.min(d2);
            let kmin = s.u64_opt("kmin").unwrap_or(1);
            let kmax = s.u64_opt("kmax").unwrap_or(band_top);
            let seed = s.u64_opt("seed");
            if seed.is_none() {
                s.violations.push(
                    "initial_condition.seed is required for kind \"random_bandlimited\"".into(),
                );
            }
            if kmax > band_top || kmin.max(1) > kmax {
                s.violations.push(format!(
                    "initial_condition band [{kmin}, {kmax}] must satisfy \
                     1 <= kmin <= kmax <= {band_top} on this grid"
                ));
            }
            if !gamma.is_finite() {
                s.violations
                    .push(format!("initial_condition.gamma must be finite, got {gamma}"));
            }
            InitialCondition::RandomBandlimited {
                gamma,
                kmin,
                kmax,
                seed: seed.unwrap_or(0),
                amplitude,
            }
        }
        "vortex_pair" => {
            let separation = s.f64("separation", grid.l1 / 4.0);
            let radius = s.f64("radius", grid.l1 / 16.0);
            for (name, v) in [("separation", separation), ("radius", radius)] {
                if !(v > 0.0) || !v.is_finite() {
                    s.violations.push(format!(
                        "initial_condition.{name} must be a positive real, got {v}"
                    ));
                }
            }
            InitialCondition::VortexPair {
                separation,
                radius,
                amplitude,
            }
        }
        "x1_profile" => {
            let coeffs = s.f64_array("coeffs", &[1.0]);
            if coeffs.is_empty() || coeffs.len() as u64 > d1 {
                s.violations.push(format!(
                    "initial_condition.coeffs must hold between 1 and {d1} numbers \
                     on this grid, got {}",
                    coeffs.len()
                ));
            }
            InitialCondition::X1Profile { coeffs, amplitude }
        }
        other => {
            s.violations.push(format!(
                "initial_condition.kind must be one of \"single_mode\", \
                 \"random_bandlimited\", \"vortex_pair\", \"x1_profile\"; got \"{other}\""
            ));
            fallback.clone()
        }
    };
    if !amplitude.is_finite() {
        s.violations.push(format!(
            "initial_condition.amplitude must be finite, got {amplitude}"
        ));
    }
    s.finish();
    ic
}

fn parse_output(doc: &mut Map<String, Value>, violations: &mut Vec<String>) -> OutputConfig {
    let d = OutputConfig::default();
    let mut s = Section::new(doc, "output", violations);
    let directory = s
        .string("directory")
        .map(PathBuf::from)
        .unwrap_or(d.directory);
    let formats = match s.take("formats") {
        None => d.formats,
        Some(Value::Array(items)) => {
            let mut out = Vec::new();
            for item in &items {
                match item.as_str() {
                    Some("ndjson") => out.push(OutputFormat::Ndjson),
                    Some("csv") => out.push(OutputFormat::Csv),
                    _ => s.violations.push(format!(
                        "output.formats entries must be \"ndjson\" or \"csv\", got {item}"
                    )),
                }
            }
            out
        }
        Some(v) => {
            s.complain("formats", "an array of format names", &v);
            vec![OutputFormat::Ndjson]
        }
    };
    s.finish();
    OutputConfig { directory, formats }
}

/// Parses and validates a JSON config document, reporting every violation at
/// once. `{}` is valid and yields the documented defaults.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| AqgError::Config(vec![format!("configuration is not valid JSON: {e}")]))?;
    let mut doc = match value {
        Value::Object(map) => map,
        other => {
            return Err(AqgError::Config(vec![format!(
                "configuration must be a JSON object, got {}",
                kind_name(&other)
            )]))
        }
    };

    let mut violations = Vec::new();
    let grid = parse_grid(&mut doc, &mut violations);
    let params = parse_params(&mut doc, &mut violations);
    let solver = parse_solver(&mut doc, &mut violations);
    let initial_condition = parse_initial(&mut doc, &grid, &mut violations);
    let output = parse_output(&mut doc, &mut violations);
    for key in doc.keys() {
        violations.push(format!("unknown key: {key}"));
    }
    if !violations.is_empty() {
        return Err(AqgError::Config(violations));
    }

    let mut warnings = Vec::new();
    let region = classify_region(params.alpha(), params.beta())
        .expect("orders validated with the params");
    if !region.satisfies_11 {
        warnings.push(format!(
            "(alpha, beta) = ({}, {}) does not satisfy the decay-region condition \
             (margin {:.4}); norms above L2 are not guaranteed to decay",
            params.alpha(),
            params.beta(),
            region.margin
        ));
    }
    Ok(ParsedConfig {
        config: ExperimentConfig {
            grid,
            params,
            solver,
            initial_condition,
            output,
        },
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_yields_the_documented_defaults() {
        let parsed = parse_config("{}").unwrap();
        let c = parsed.config;
        assert_eq!(c.grid, GridConfig::default());
        assert_eq!(c.params.alpha(), 0.75);
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(
            c.initial_condition,
            InitialCondition::SingleMode {
                k: (1, 0),
                amplitude: 1.0
            }
        );
        assert_eq!(c.output, OutputConfig::default());
        assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
    }

    #[test]
    fn all_violations_reported_at_once() {
        let text = r#"{
            "params": {"alpha": 1.0, "mu": -2.0},
            "solver": {"dt": -0.5, "dtt": 1},
            "mystery": true
        }"#;
        match parse_config(text) {
            Err(AqgError::Config(list)) => {
                assert!(list.len() >= 5, "{list:?}");
                assert!(list
                    .iter()
                    .any(|m| m.contains("alpha must lie in the open interval (0,1)")));
                assert!(list.iter().any(|m| m.contains("mu must be a positive real")));
                assert!(list.iter().any(|m| m.contains("dt must be a positive real")));
                assert!(list.iter().any(|m| m == "unknown key: solver.dtt"));
                assert!(list.iter().any(|m| m == "unknown key: mystery"));
            }
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn below_threshold_parses_with_a_margin_warning() {
        let text = r#"{"params": {"alpha": 0.75, "beta": 0.1}}"#;
        let parsed = parse_config(text).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        let w = &parsed.warnings[0];
        assert!(w.contains("margin -0.06"), "{w}");
    }

    #[test]
    fn initial_condition_must_fit_the_grid() {
        let text = r#"{"initial_condition": {"kind": "single_mode", "k": [30, 0]}}"#;
        assert!(matches!(parse_config(text), Err(AqgError::Config(_))));

        let text = r#"{"initial_condition": {"kind": "random_bandlimited", "kmax": 40, "seed": 1}}"#;
        assert!(parse_config(text).is_err(), "kmax beyond the 64-grid band");

        let text = r#"{"initial_condition": {"kind": "random_bandlimited", "kmax": 21, "seed": 1}}"#;
        assert!(parse_config(text).is_ok());

        let text = r#"{"initial_condition": {"kind": "random_bandlimited"}}"#;
        match parse_config(text) {
            Err(AqgError::Config(list)) => {
                assert!(list.iter().any(|m| m.contains("seed is required")), "{list:?}")
            }
            other => panic!("expected missing-seed violation, got {other:?}"),
        }
    }

    #[test]
    fn integrator_and_format_names_are_strict() {
        let parsed =
            parse_config(r#"{"solver": {"integrator": "if_euler"}}"#).unwrap();
        assert_eq!(parsed.config.solver.integrator, Integrator::IfEuler);
        assert!(parse_config(r#"{"solver": {"integrator": "rk4"}}"#).is_err());
        let parsed =
            parse_config(r#"{"output": {"formats": ["ndjson", "csv"]}}"#).unwrap();
        assert_eq!(
            parsed.config.output.formats,
            vec![OutputFormat::Ndjson, OutputFormat::Csv]
        );
        assert!(parse_config(r#"{"output": {"formats": ["tsv"]}}"#).is_err());
    }

    #[test]
    fn wrong_types_name_the_path() {
        match parse_config(r#"{"grid": {"n1": "big"}}"#) {
            Err(AqgError::Config(list)) => {
                assert!(list.iter().any(|m| m.contains("grid.n1")), "{list:?}")
            }
            other => panic!("expected type violation, got {other:?}"),
        }
        assert!(parse_config("[1, 2]").is_err());
        assert!(parse_config("not json").is_err());
    }

    #[test]
    fn vortex_defaults_are_box_relative() {
        let parsed = parse_config(r#"{"initial_condition": {"kind": "vortex_pair"}}"#).unwrap();
        match parsed.config.initial_condition {
            InitialCondition::VortexPair {
                separation, radius, ..
            } => {
                assert!((separation - DEFAULT_BOX_SIDE / 4.0).abs() < 1e-12);
                assert!((radius - DEFAULT_BOX_SIDE / 16.0).abs() < 1e-12);
            }
            other => panic!("wrong kind: {other:?}"),
        }
    }
}
