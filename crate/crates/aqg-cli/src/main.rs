//! Command-line driver: single experiments, exponent sweeps, estimate-catalog
//! verification, and record conversion.
//!
//! Exit codes: 0 when everything asserted passed, 1 for operational failures
//! (bad arguments, unreadable files, solver errors), 2 when a run finished but
//! an asserted invariant — energy budget, maximum principle, high-frequency
//! bound, or a catalog inequality — did not hold.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aqg::{
    parse_config, records_to_csv, run_experiment, run_sweep, standard_suite, AqgError, Branch,
    ExperimentConfig, SweepRow,
};

#[derive(Parser)]
#[command(
    name = "aqg",
    version,
    about = "Pseudo-spectral solver and estimate checker for the anisotropic \
             quasi-geostrophic equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config document.
    Run {
        /// Path to the configuration file.
        config: PathBuf,
    },
    /// Re-run the config over an inclusive grid of dissipation exponents.
    Sweep {
        /// Path to the configuration file.
        config: PathBuf,
        /// Alpha range `start:stop:count` (count 1 keeps `start`).
        #[arg(long, value_name = "A0:A1:N")]
        alpha: String,
        /// Beta range `start:stop:count`.
        #[arg(long, value_name = "B0:B1:N")]
        beta: String,
    },
    /// Check the built-in estimate catalog on seeded random fields.
    ///
    /// Emits one NDJSON report line per assertion on stdout; the PASS/FAIL
    /// summary goes to stderr so piped output stays machine-readable.
    VerifyLemmas {
        /// Catalog id (2.1, 2.2, 2.3, 2.4, or 2.5); all of them when omitted.
        #[arg(long)]
        lemma: Option<String>,
        /// Random fields drawn per resolution.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Flatten an NDJSON record stream into a CSV table.
    RecordsToCsv {
        input: PathBuf,
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Keep clap's default usage-error code (2) for invariant
            // violations instead; help and version stay exit 0.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> aqg::Result<ExitCode> {
    match command {
        Command::Run { config } => run_verb(&config),
        Command::Sweep {
            config,
            alpha,
            beta,
        } => sweep_verb(&config, &alpha, &beta),
        Command::VerifyLemmas {
            lemma,
            samples,
            seed,
        } => verify_verb(lemma.as_deref(), samples, seed),
        Command::RecordsToCsv { input, output } => {
            let rows = records_to_csv(&input, &output).map_err(|err| {
                AqgError::Records(format!(
                    "{} -> {}: {err}",
                    input.display(),
                    output.display()
                ))
            })?;
            println!("wrote {} ({rows} rows)", output.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_for(all_passed: bool) -> ExitCode {
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn load_config(path: &Path) -> aqg::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| AqgError::Config(vec![format!("cannot read {}: {err}", path.display())]))?;
    let parsed = parse_config(&text)?;
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(parsed.config)
}

fn check_line(name: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    if detail.is_empty() {
        println!("[{tag}] {name}");
    } else {
        println!("[{tag}] {name} ({detail})");
    }
}

fn run_verb(path: &Path) -> aqg::Result<ExitCode> {
    let config = load_config(path)?;
    let outcome = run_experiment(&config)?;
    let summary = &outcome.summary;
    println!("wrote {}", outcome.directory.display());
    println!(
        "t_final {} over {} records",
        summary.t_final, summary.record_count
    );
    check_line(
        "energy budget",
        outcome.verdicts.budget,
        &format!("worst residual {:+.3e}", summary.budget_worst_residual),
    );
    check_line("maximum principle", outcome.verdicts.max_principle, "");
    check_line("high-frequency bound", outcome.verdicts.high_freq, "");
    if let Some(fit) = &summary.split_rate {
        println!(
            "low-frequency growth rate {:.3} over {} cutoffs",
            fit.rate, fit.points_used
        );
    }
    Ok(exit_for(outcome.verdicts.all()))
}

/// Inclusive `start:stop:count` range; `count == 1` degenerates to `[start]`.
fn parse_range(text: &str, name: &str) -> aqg::Result<Vec<f64>> {
    let invalid =
        |detail: &str| AqgError::InvalidParameter(format!("--{name} {text:?}: {detail}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(invalid("expected start:stop:count"));
    };
    let start: f64 = start
        .parse()
        .map_err(|_| invalid("start is not a number"))?;
    let stop: f64 = stop.parse().map_err(|_| invalid("stop is not a number"))?;
    let count: usize = count
        .parse()
        .map_err(|_| invalid("count is not a positive integer"))?;
    if !start.is_finite() || !stop.is_finite() {
        return Err(invalid("endpoints must be finite"));
    }
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
        .collect())
}

fn row_line(row: &SweepRow) -> String {
    let mut line = format!("alpha {:.4} beta {:.4}", row.alpha, row.beta);
    let branch = match row.branch {
        Branch::LowAlpha => "low-alpha",
        Branch::HighAlpha => "high-alpha",
    };
    let region = if row.satisfies_11 { "inside" } else { "outside" };
    line.push_str(&format!(
        " [{branch}, {region} the decay region, margin {:+.4}]",
        row.margin
    ));
    if let Some(t) = row.time_to_eps {
        line.push_str(&format!(" t(1e-2) {t}"));
    }
    if let Some(residual) = row.budget_residual {
        line.push_str(&format!(" residual {residual:+.3e}"));
    }
    match &row.error {
        Some(err) => line.push_str(&format!(" — failed: {err}")),
        None if !row.passed => line.push_str(" — verdicts failed"),
        None => {}
    }
    line
}

fn sweep_verb(path: &Path, alpha: &str, beta: &str) -> aqg::Result<ExitCode> {
    let alphas = parse_range(alpha, "alpha")?;
    let betas = parse_range(beta, "beta")?;
    let config = load_config(path)?;
    let report = run_sweep(&config, &alphas, &betas)?;
    println!("wrote {}", report.directory.display());
    for row in &report.rows {
        let tag = if row.passed { "ok" } else { "FAIL" };
        println!("[{tag}] {}", row_line(row));
    }
    let failed = report.rows.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        println!("all {} cells passed", report.rows.len());
    } else {
        println!("{failed} of {} cells failed", report.rows.len());
    }
    Ok(exit_for(report.all_passed))
}

fn verify_verb(lemma: Option<&str>, samples: usize, seed: u64) -> aqg::Result<ExitCode> {
    if samples == 0 {
        return Err(AqgError::InvalidParameter(
            "--samples must be at least 1".into(),
        ));
    }
    let verdicts = standard_suite(lemma, samples, seed)?;
    let mut all_passed = true;
    for verdict in &verdicts {
        println!("{}", verdict.to_json_line());
        let tag = if verdict.passed { "PASS" } else { "FAIL" };
        eprintln!(
            "[{tag}] {} — {} (observed {:.12e}, {} samples)",
            verdict.report.lemma, verdict.requirement, verdict.observed, verdict.report.sample_count
        );
        all_passed &= verdict.passed;
    }
    eprintln!(
        "{} of {} assertions passed",
        verdicts.iter().filter(|v| v.passed).count(),
        verdicts.len()
    );
    Ok(exit_for(all_passed))
}
