//! Run orchestration: a single experiment writes `records.ndjson` (streamed),
//! `summary.json`, `plot.gp`, optionally `records.csv`, and always a
//! `manifest.json` recording what landed on disk; a sweep runs one experiment
//! per (alpha, beta) cell in parallel and collects `sweep.ndjson`.
//!
//! The library never prints; pass/fail verdicts come back in [`RunOutcome`]
//! and the caller decides what to do with them. The environment variable
//! `AQG_OUTPUT_DIR` overrides the configured output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::dynamics::diagnostics::fmt_num;
use crate::dynamics::{Branch, DiagnosticsRecord, DissipationParams, Solver};
use crate::error::{AqgError, Result};
use crate::initial::{generate_initial, InitialCondition};
use crate::norms::l2_norm;
use crate::randfield::splitmix64;
use crate::records::{
    read_records, records_to_csv, summarize, RecordWriter, RunSummary, SummaryContext,
};

/// Maximum-principle slack: every `L^p` norm may exceed its initial value by
/// at most this relative amount (discretization rounding only).
pub const MAX_PRINCIPLE_TOL: f64 = 1e-6;
/// Slack on the high-frequency energy bound, which holds exactly in exact
/// arithmetic.
pub const HIGH_FREQ_TOL: f64 = 1e-10;

pub const ENV_OUTPUT_DIR: &str = "AQG_OUTPUT_DIR";

/// Pass/fail of the invariants asserted on every run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunVerdicts {
    /// `|worst budget residual| <= budget_rel_tol * ‖θ⁰‖²`.
    pub budget: bool,
    /// Every recorded `L^p` norm (including `L^∞`) stayed within
    /// `1 + MAX_PRINCIPLE_TOL` of its initial value.
    pub max_principle: bool,
    /// `‖v_δ‖² <= δ^{−2α}‖|∂₁|^α θ‖² + δ^{−2β}‖|∂₂|^β θ‖²` held for every
    /// record and cutoff, within `HIGH_FREQ_TOL`.
    pub high_freq: bool,
}

impl RunVerdicts {
    pub fn all(&self) -> bool {
        self.budget && self.max_principle && self.high_freq
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub directory: PathBuf,
    pub verdicts: RunVerdicts,
    pub summary: RunSummary,
}

/// Incremental verdict state, fed one record at a time so runs stay streaming.
struct VerdictTracker {
    params: DissipationParams,
    fundamental: f64,
    budget_rel_tol: f64,
    initial: Option<DiagnosticsRecord>,
    worst_residual: f64,
    max_principle: bool,
    high_freq: bool,
}

impl VerdictTracker {
    fn new(params: DissipationParams, fundamental: f64, budget_rel_tol: f64) -> Self {
        VerdictTracker {
            params,
            fundamental,
            budget_rel_tol,
            initial: None,
            worst_residual: 0.0,
            max_principle: true,
            high_freq: true,
        }
    }

    fn observe(&mut self, record: &DiagnosticsRecord) {
        if self.initial.is_none() {
            self.initial = Some(record.clone());
        }
        let initial = self.initial.as_ref().expect("seeded above");
        self.worst_residual = self.worst_residual.max(record.budget_residual.abs());
        if record.linf > initial.linf * (1.0 + MAX_PRINCIPLE_TOL) {
            self.max_principle = false;
        }
        for ((_, v), (_, v0)) in record.lp.iter().zip(&initial.lp) {
            if *v > v0 * (1.0 + MAX_PRINCIPLE_TOL) {
                self.max_principle = false;
            }
        }
        for split in &record.split {
            let delta = split.delta_multiple * self.fundamental;
            let rhs = delta.powf(-2.0 * self.params.alpha()) * record.diss1
                + delta.powf(-2.0 * self.params.beta()) * record.diss2;
            if split.high * split.high > rhs * (1.0 + HIGH_FREQ_TOL) {
                self.high_freq = false;
            }
        }
    }

    fn verdicts(&self, l2_initial_sq: f64) -> RunVerdicts {
        RunVerdicts {
            budget: self.worst_residual <= self.budget_rel_tol * l2_initial_sq.max(f64::MIN_POSITIVE),
            max_principle: self.max_principle,
            high_freq: self.high_freq,
        }
    }
}

fn resolve_output_dir(configured: &Path) -> PathBuf {
    match std::env::var_os(ENV_OUTPUT_DIR) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => configured.to_path_buf(),
    }
}

fn plot_script(config: &ExperimentConfig) -> String {
    let mut columns = vec!["l2".to_string(), "linf".to_string()];
    columns.extend(config.solver.p_diag.iter().map(|&p| format!("lp.{}", fmt_num(p))));
    columns.extend(config.solver.s_diag.iter().map(|&s| format!("hs.{}", fmt_num(s))));
    let plots: Vec<String> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let src = if i == 0 { "\"records.csv\"" } else { "\"\"" };
            format!("  {src} using \"t\":\"{c}\" with lines title \"{c}\"")
        })
        .collect();
    format!(
        "# Norm decay curves, log scale.\n\
         # Needs records.csv next to this script; generate it with:\n\
         #   aqg records-to-csv records.ndjson records.csv\n\
         set datafile separator comma\n\
         set logscale y\n\
         set xlabel \"t\"\n\
         set ylabel \"norm\"\n\
         set key outside\n\
         set term pngcairo size 1000,700\n\
         set output \"decay.png\"\n\
         plot \\\n{}\n",
        plots.join(", \\\n")
    )
}

fn write_manifest(
    dir: &Path,
    status: &str,
    files: &[&str],
    error: Option<&str>,
    verdicts: Option<&RunVerdicts>,
) -> Result<()> {
    let mut root = Map::new();
    root.insert("status".into(), Value::String(status.into()));
    root.insert(
        "files".into(),
        Value::Array(files.iter().map(|f| Value::String((*f).into())).collect()),
    );
    root.insert(
        "error".into(),
        error.map(|e| Value::String(e.into())).unwrap_or(Value::Null),
    );
    if let Some(v) = verdicts {
        let mut m = Map::new();
        m.insert("budget".into(), Value::Bool(v.budget));
        m.insert("max_principle".into(), Value::Bool(v.max_principle));
        m.insert("high_freq".into(), Value::Bool(v.high_freq));
        root.insert("verdicts".into(), Value::Object(m));
    }
    let mut text =
        serde_json::to_string_pretty(&Value::Object(root)).expect("manifest serialization");
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

/// Runs one experiment, writing all artifacts under the output directory
/// (honoring `AQG_OUTPUT_DIR`). A `manifest.json` is always left behind, with
/// `status: "failed"` and the partial file list if anything went wrong.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    let dir = resolve_output_dir(&config.output.directory);
    fs::create_dir_all(&dir)?;
    let mut files: Vec<&str> = Vec::new();
    match run_experiment_inner(config, &dir, &mut files) {
        Ok(outcome) => {
            write_manifest(&dir, "ok", &files, None, Some(&outcome.verdicts))?;
            Ok(outcome)
        }
        Err(e) => {
            // Best effort: the manifest itself may be unwritable.
            let _ = write_manifest(&dir, "failed", &files, Some(&e.to_string()), None);
            Err(e)
        }
    }
}

fn run_experiment_inner(
    config: &ExperimentConfig,
    dir: &Path,
    files: &mut Vec<&'static str>,
) -> Result<RunOutcome> {
    let grid = config.grid.build()?;
    let theta0 = generate_initial(&config.initial_condition, &grid)?;
    let solver = Solver::new(grid.clone(), config.params, config.solver.clone())?;
    let l2_initial_sq = l2_norm(&theta0).powi(2);

    let records_path = dir.join("records.ndjson");
    let mut writer = RecordWriter::create(&records_path)?;
    files.push("records.ndjson");
    let mut tracker = VerdictTracker::new(
        config.params,
        grid.fundamental(),
        config.solver.budget_rel_tol,
    );
    solver.run(&theta0, |record| {
        tracker.observe(record);
        writer.write(record)
    })?;
    writer.finish()?;

    // The summary is recomputed from disk so it is a function of the records
    // alone, not of anything the run kept in memory.
    let records = read_records(&records_path)?;
    let summary = summarize(
        &records,
        &SummaryContext {
            params: config.params,
            fundamental: grid.fundamental(),
        },
    )?;
    fs::write(dir.join("summary.json"), summary.to_json())?;
    files.push("summary.json");

    fs::write(dir.join("plot.gp"), plot_script(config))?;
    files.push("plot.gp");

    if config.output.formats.contains(&OutputFormat::Csv) {
        records_to_csv(&records_path, &dir.join("records.csv"))?;
        files.push("records.csv");
    }

    Ok(RunOutcome {
        directory: dir.to_path_buf(),
        verdicts: tracker.verdicts(l2_initial_sq),
        summary,
    })
}

// ---------------------------------------------------------------------------
// Sweeps.

/// One `(alpha, beta)` cell of a sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub satisfies_11: bool,
    pub margin: f64,
    pub branch: Branch,
    /// First record time with `hs <= 1e-2 * hs(0)` (the leading diagnostic
    /// Sobolev norm; `l2` when none is configured).
    pub time_to_eps: Option<f64>,
    pub budget_residual: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn to_json_line(&self) -> String {
        let mut map = Map::new();
        map.insert("alpha".into(), Value::from(self.alpha));
        map.insert("beta".into(), Value::from(self.beta));
        map.insert("satisfies_11".into(), Value::Bool(self.satisfies_11));
        map.insert("margin".into(), Value::from(self.margin));
        map.insert(
            "branch".into(),
            Value::String(
                match self.branch {
                    Branch::LowAlpha => "low_alpha",
                    Branch::HighAlpha => "high_alpha",
                }
                .into(),
            ),
        );
        map.insert(
            "time_to_eps".into(),
            self.time_to_eps.map(Value::from).unwrap_or(Value::Null),
        );
        map.insert(
            "budget_residual".into(),
            self.budget_residual.map(Value::from).unwrap_or(Value::Null),
        );
        map.insert("passed".into(), Value::Bool(self.passed));
        map.insert(
            "error".into(),
            self.error
                .as_ref()
                .map(|e| Value::String(e.clone()))
                .unwrap_or(Value::Null),
        );
        serde_json::to_string(&Value::Object(map)).expect("row serialization")
    }
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub directory: PathBuf,
    pub rows: Vec<SweepRow>,
    /// True when every cell ran and passed its verdicts.
    pub all_passed: bool,
}

/// The decay threshold the sweep reads per cell: the leading `hs` series at
/// the middle epsilon (1e-2), falling back to `l2`.
fn cell_time_to_eps(config: &ExperimentConfig, summary: &RunSummary) -> Option<f64> {
    let preferred = config
        .solver
        .s_diag
        .first()
        .map(|&s| format!("hs.{}", fmt_num(s)));
    let name = preferred.as_deref().unwrap_or("l2");
    summary
        .time_to_eps
        .iter()
        .find(|(k, _)| k == name)
        .or_else(|| summary.time_to_eps.iter().find(|(k, _)| k == "l2"))
        .and_then(|(_, hits)| hits[1])
}

/// Runs one experiment per `(alpha, beta)` cell under `<output>/cell-i-j/`,
/// in parallel, and writes `sweep.ndjson` plus a manifest at the root. Cell
/// failures are recorded in their rows; the sweep itself keeps going.
///
/// Random initial conditions get per-cell seeds derived from the configured
/// master seed — except for a 1×1 sweep, which is exactly `run_experiment`.
pub fn run_sweep(config: &ExperimentConfig, alphas: &[f64], betas: &[f64]) -> Result<SweepReport> {
    use rayon::prelude::*;

    if alphas.is_empty() || betas.is_empty() {
        return Err(AqgError::InvalidParameter(
            "sweep needs at least one alpha and one beta".into(),
        ));
    }
    let root = resolve_output_dir(&config.output.directory);
    fs::create_dir_all(&root)?;

    let single_cell = alphas.len() * betas.len() == 1;
    let cells: Vec<(usize, usize, f64, f64)> = alphas
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| betas.iter().enumerate().map(move |(j, &b)| (i, j, a, b)))
        .collect();

    let mut rows: Vec<(usize, SweepRow)> = cells
        .par_iter()
        .map(|&(i, j, alpha, beta)| {
            let row = run_cell(config, &root, i, j, alpha, beta, single_cell);
            (i * betas.len() + j, row)
        })
        .collect();
    rows.sort_by_key(|(idx, _)| *idx);
    let rows: Vec<SweepRow> = rows.into_iter().map(|(_, r)| r).collect();

    let mut ndjson = String::new();
    for row in &rows {
        ndjson.push_str(&row.to_json_line());
        ndjson.push('\n');
    }
    fs::write(root.join("sweep.ndjson"), ndjson)?;
    let all_passed = rows.iter().all(|r| r.passed && r.error.is_none());
    write_manifest(&root, "ok", &["sweep.ndjson"], None, None)?;
    Ok(SweepReport {
        directory: root,
        rows,
        all_passed,
    })
}

fn run_cell(
    config: &ExperimentConfig,
    root: &Path,
    i: usize,
    j: usize,
    alpha: f64,
    beta: f64,
    single_cell: bool,
) -> SweepRow {
    let mut row = SweepRow {
        alpha,
        beta,
        satisfies_11: false,
        margin: f64::NAN,
        branch: Branch::LowAlpha,
        time_to_eps: None,
        budget_residual: None,
        passed: false,
        error: None,
    };
    let params = match DissipationParams::new(
        config.params.mu(),
        config.params.nu(),
        alpha,
        beta,
    ) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let region = params.classify();
    row.satisfies_11 = region.satisfies_11;
    row.margin = region.margin;
    row.branch = region.branch;

    let mut cell_config = config.clone();
    cell_config.params = params;
    cell_config.output.directory = root.join(format!("cell-{i}-{j}"));
    if !single_cell {
        if let InitialCondition::RandomBandlimited { seed, .. } =
            &mut cell_config.initial_condition
        {
            *seed = splitmix64(*seed ^ (((i as u64) << 32) | j as u64));
        }
    }
    // Cells must not race on the environment override: it was already folded
    // into `root` by the caller.
    match run_experiment_at(&cell_config) {
        Ok(outcome) => {
            row.time_to_eps = cell_time_to_eps(&cell_config, &outcome.summary);
            row.budget_residual = Some(outcome.summary.budget_worst_residual);
            row.passed = outcome.verdicts.all();
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// [`run_experiment`] without the `AQG_OUTPUT_DIR` resolution, for callers
/// that already placed the directory.
fn run_experiment_at(config: &ExperimentConfig) -> Result<RunOutcome> {
    let dir = config.output.directory.clone();
    fs::create_dir_all(&dir)?;
    let mut files: Vec<&str> = Vec::new();
    match run_experiment_inner(config, &dir, &mut files) {
        Ok(outcome) => {
            write_manifest(&dir, "ok", &files, None, Some(&outcome.verdicts))?;
            Ok(outcome)
        }
        Err(e) => {
            let _ = write_manifest(&dir, "failed", &files, Some(&e.to_string()), None);
            Err(e)
        }
    }
}
