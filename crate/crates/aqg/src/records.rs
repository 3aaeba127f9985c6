//! Record persistence (streaming NDJSON writer/reader, CSV conversion) and
//! the run summary derived from a record series.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::dynamics::diagnostics::fmt_num;
use crate::dynamics::{energy_budget, DiagnosticsRecord, DissipationParams};
use crate::error::{AqgError, Result};
use crate::splitting::{calibrate_c_emp, fit_growth_rate, growth_samples, RateFit};

/// Streaming NDJSON writer; one record per line, flushed on [`finish`].
///
/// [`finish`]: RecordWriter::finish
pub struct RecordWriter {
    out: BufWriter<File>,
    count: usize,
}

impl RecordWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(RecordWriter {
            out: BufWriter::new(File::create(path)?),
            count: 0,
        })
    }

    pub fn write(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        self.out.write_all(record.to_json_line().as_bytes())?;
        self.out.write_all(b"\n")?;
        self.count += 1;
        Ok(())
    }

    /// Flushes and returns the number of records written.
    pub fn finish(mut self) -> Result<usize> {
        self.out.flush()?;
        Ok(self.count)
    }
}

fn line_error(lineno: usize, e: AqgError) -> AqgError {
    let detail = match e {
        AqgError::Records(msg) => msg,
        other => other.to_string(),
    };
    AqgError::Records(format!("line {lineno}: {detail}"))
}

/// Applies `f` to each record of an NDJSON file in order; parse errors cite
/// the 1-based line number. Blank lines are ignored.
pub fn for_each_record<F>(path: &Path, mut f: F) -> Result<usize>
where
    F: FnMut(DiagnosticsRecord) -> Result<()>,
{
    let reader = BufReader::new(File::open(path)?);
    let mut count = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record =
            DiagnosticsRecord::from_json_line(&line).map_err(|e| line_error(idx + 1, e))?;
        f(record)?;
        count += 1;
    }
    Ok(count)
}

pub fn read_records(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut records = Vec::new();
    for_each_record(path, |r| {
        records.push(r);
        Ok(())
    })?;
    Ok(records)
}

/// Flat `(key, value)` pairs of a record, in NDJSON key order, with values as
/// JSON numbers so CSV cells print byte-identically to the NDJSON fields.
fn flat_pairs(record: &DiagnosticsRecord) -> Vec<(String, Value)> {
    match serde_json::from_str::<Value>(&record.to_json_line()) {
        Ok(Value::Object(map)) => map.into_iter().collect(),
        _ => unreachable!("record serialization is a flat object"),
    }
}

/// Converts an NDJSON record file to CSV with one column per flat key.
/// Every record must carry exactly the header's fields. Returns the number of
/// data rows.
pub fn records_to_csv(input: &Path, output: &Path) -> Result<usize> {
    let mut out = BufWriter::new(File::create(output)?);
    let mut header: Option<Vec<String>> = None;
    let rows = for_each_record(input, |record| {
        let pairs = flat_pairs(&record);
        match &header {
            None => {
                let keys: Vec<String> = pairs.iter().map(|(k, _)| k.clone()).collect();
                writeln!(out, "{}", keys.join(","))?;
                header = Some(keys);
            }
            Some(keys) => {
                if keys.len() != pairs.len()
                    || keys.iter().zip(&pairs).any(|(k, (pk, _))| k != pk)
                {
                    return Err(AqgError::Records(format!(
                        "record at t = {} does not match the header columns",
                        record.t
                    )));
                }
            }
        }
        let row: Vec<String> = pairs.iter().map(|(_, v)| v.to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
        Ok(())
    })?;
    if rows == 0 {
        return Err(AqgError::Records(format!(
            "{} holds no records",
            input.display()
        )));
    }
    out.flush()?;
    Ok(rows)
}

/// Thresholds of the time-to-ε decay table, relative to the initial value.
pub const DECAY_EPSILONS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Constants a summary needs beyond the records themselves (they come from
/// the config, not the state).
#[derive(Clone, Copy, Debug)]
pub struct SummaryContext {
    pub params: DissipationParams,
    /// Fundamental wavenumber `2π/max(l1, l2)` of the run's box.
    pub fundamental: f64,
}

/// Everything `summary.json` holds; a pure function of the record series (plus
/// the config constants in [`SummaryContext`]).
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub t_final: f64,
    /// Final value of every norm series, NDJSON key order.
    pub final_norms: Vec<(String, f64)>,
    /// Per norm series: first record time with `value <= eps * value(0)` for
    /// each of [`DECAY_EPSILONS`]; 0 when the initial value is 0, `None` when
    /// never reached.
    pub time_to_eps: Vec<(String, [Option<f64>; 3])>,
    /// Budget residual of largest magnitude over the run (signed).
    pub budget_worst_residual: f64,
    /// Least-squares fit of low-frequency growth against the cutoff, when at
    /// least three cutoffs saw positive growth.
    pub split_rate: Option<RateFit>,
    /// Empirical constant calibrating growth against the theoretical envelope.
    pub c_emp: Option<f64>,
    pub record_count: usize,
}

fn norm_series(record: &DiagnosticsRecord) -> Vec<(String, f64)> {
    let mut out = vec![("l2".to_string(), record.l2), ("linf".to_string(), record.linf)];
    out.extend(record.lp.iter().map(|&(p, v)| (format!("lp.{}", fmt_num(p)), v)));
    out.extend(record.hs.iter().map(|&(s, v)| (format!("hs.{}", fmt_num(s)), v)));
    out.extend(
        record
            .hsdot
            .iter()
            .map(|&(s, v)| (format!("hsdot.{}", fmt_num(s)), v)),
    );
    out
}

pub fn summarize(records: &[DiagnosticsRecord], ctx: &SummaryContext) -> Result<RunSummary> {
    let first = records
        .first()
        .ok_or_else(|| AqgError::Records("summary needs at least one record".into()))?;
    let last = records.last().expect("nonempty");
    let names: Vec<String> = norm_series(first).into_iter().map(|(k, _)| k).collect();
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(records.len()); names.len()];
    for record in records {
        let row = norm_series(record);
        if row.len() != names.len() || row.iter().zip(&names).any(|((k, _), n)| k != n) {
            return Err(AqgError::Records(format!(
                "record at t = {} reports a different norm set than the first record",
                record.t
            )));
        }
        for (slot, (_, v)) in series.iter_mut().zip(row) {
            slot.push(v);
        }
    }

    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let time_to_eps = names
        .iter()
        .zip(&series)
        .map(|(name, values)| {
            let v0 = values[0];
            let mut hits = [None; 3];
            for (slot, &eps) in hits.iter_mut().zip(&DECAY_EPSILONS) {
                *slot = if v0 == 0.0 {
                    Some(0.0)
                } else {
                    values
                        .iter()
                        .position(|&v| v <= eps * v0)
                        .map(|i| times[i])
                };
            }
            (name.clone(), hits)
        })
        .collect();

    let multiples: Vec<f64> = first.split.iter().map(|s| s.delta_multiple).collect();
    let (split_rate, c_emp) = if multiples.is_empty() {
        (None, None)
    } else {
        let samples = growth_samples(records, first.l2, &ctx.params, &multiples, ctx.fundamental)?;
        (fit_growth_rate(&samples).ok(), calibrate_c_emp(&samples))
    };

    Ok(RunSummary {
        t_final: last.t,
        final_norms: norm_series(last),
        time_to_eps,
        budget_worst_residual: energy_budget(records)?,
        split_rate,
        c_emp,
        record_count: records.len(),
    })
}

impl RunSummary {
    /// Pretty JSON document (insertion-ordered), ending in a newline.
    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("t_final".into(), Value::from(self.t_final));
        root.insert("record_count".into(), Value::from(self.record_count));
        let mut finals = Map::new();
        for (k, v) in &self.final_norms {
            finals.insert(k.clone(), Value::from(*v));
        }
        root.insert("final".into(), Value::Object(finals));
        let mut tte = Map::new();
        for (name, hits) in &self.time_to_eps {
            let mut per_eps = Map::new();
            for (&eps, &hit) in DECAY_EPSILONS.iter().zip(hits) {
                per_eps.insert(
                    format!("{eps:e}"),
                    hit.map(Value::from).unwrap_or(Value::Null),
                );
            }
            tte.insert(name.clone(), Value::Object(per_eps));
        }
        root.insert("time_to_eps".into(), Value::Object(tte));
        root.insert(
            "budget_worst_residual".into(),
            Value::from(self.budget_worst_residual),
        );
        let rate = match &self.split_rate {
            None => Value::Null,
            Some(fit) => {
                let mut m = Map::new();
                m.insert("rate".into(), Value::from(fit.rate));
                m.insert("log_prefactor".into(), Value::from(fit.log_prefactor));
                m.insert("points_used".into(), Value::from(fit.points_used));
                Value::Object(m)
            }
        };
        root.insert("split_rate".into(), rate);
        root.insert(
            "c_emp".into(),
            self.c_emp.map(Value::from).unwrap_or(Value::Null),
        );
        let mut text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("summary serialization cannot fail");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SplitNorms;
    use std::path::PathBuf;

    fn scratch(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("aqg-records-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    /// Exact linear-decay record: a single mode with symbol `lam`, so
    /// `l2(t) = e^{-lam t}` and `cum = (1 - e^{-2 lam t})/2` close the budget.
    fn exact_record(t: f64, lam: f64) -> DiagnosticsRecord {
        let l2 = (-lam * t).exp();
        let cum = 0.5 * (1.0 - (-2.0 * lam * t).exp());
        DiagnosticsRecord {
            t,
            l2,
            linf: l2,
            lp: vec![(2.0, l2)],
            hs: vec![(2.0, 2.0 * l2)],
            hsdot: vec![(2.0, 2.0 * l2)],
            diss1: 0.5 * lam * l2 * l2,
            diss2: 0.5 * lam * l2 * l2,
            cum1: 0.5 * cum,
            cum2: 0.5 * cum,
            split: vec![SplitNorms {
                delta_multiple: 2.0,
                low: l2,
                high: 0.0,
            }],
            budget_residual: 0.0,
        }
    }

    #[test]
    fn writer_reader_roundtrip() {
        let path = scratch("roundtrip.ndjson");
        let records: Vec<_> = (0..4).map(|i| exact_record(0.25 * i as f64, 1.0)).collect();
        let mut w = RecordWriter::create(&path).unwrap();
        for r in &records {
            w.write(r).unwrap();
        }
        assert_eq!(w.finish().unwrap(), 4);
        let back = read_records(&path).unwrap();
        assert_eq!(back, records);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn parse_errors_cite_the_line() {
        let path = scratch("broken.ndjson");
        let good = exact_record(0.0, 1.0).to_json_line();
        std::fs::write(&path, format!("{good}\nnot json\n")).unwrap();
        match read_records(&path) {
            Err(AqgError::Records(msg)) => assert!(msg.starts_with("line 2:"), "{msg}"),
            other => panic!("expected a records error, got {other:?}"),
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_matches_ndjson_fields() {
        let input = scratch("conv.ndjson");
        let output = scratch("conv.csv");
        let mut w = RecordWriter::create(&input).unwrap();
        for i in 0..3 {
            w.write(&exact_record(0.5 * i as f64, 2.0)).unwrap();
        }
        w.finish().unwrap();
        assert_eq!(records_to_csv(&input, &output).unwrap(), 3);
        let text = std::fs::read_to_string(&output).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(
            header.starts_with("t,l2,linf,lp.2,hs.2,hsdot.2,diss1,diss2,cum1,cum2,split.2.low,split.2.high,budget_residual"),
            "{header}"
        );
        assert_eq!(lines.count(), 3);
        std::fs::remove_file(&input).ok();
        std::fs::remove_file(&output).ok();
    }

    #[test]
    fn csv_rejects_heterogeneous_records() {
        let input = scratch("hetero.ndjson");
        let output = scratch("hetero.csv");
        let mut second = exact_record(1.0, 1.0);
        second.lp.push((4.0, 0.5));
        let text = format!(
            "{}\n{}\n",
            exact_record(0.0, 1.0).to_json_line(),
            second.to_json_line()
        );
        std::fs::write(&input, text).unwrap();
        assert!(matches!(
            records_to_csv(&input, &output),
            Err(AqgError::Records(_))
        ));
        std::fs::remove_file(&input).ok();
        std::fs::remove_file(&output).ok();
    }

    fn context() -> SummaryContext {
        SummaryContext {
            params: DissipationParams::new(1.0, 1.0, 0.75, 0.75).unwrap(),
            fundamental: 1.0,
        }
    }

    #[test]
    fn summary_times_to_eps_match_the_closed_form() {
        let lam = 1.0;
        let h = 0.02;
        let records: Vec<_> = (0..=600).map(|i| exact_record(h * i as f64, lam)).collect();
        let summary = summarize(&records, &context()).unwrap();
        assert_eq!(summary.record_count, 601);
        let (name, hits) = &summary.time_to_eps[0];
        assert_eq!(name, "l2");
        for (hit, eps) in hits.iter().zip(DECAY_EPSILONS) {
            let exact = (1.0 / eps).ln() / lam;
            let reported = hit.expect("reached within the horizon");
            assert!(
                reported >= exact - 1e-12 && reported <= exact + h + 1e-12,
                "eps {eps}: reported {reported}, exact {exact}"
            );
        }
        assert!(summary.budget_worst_residual.abs() < 1e-12);
        // One cutoff only: no rate fit, but the calibration still reports.
        assert!(summary.split_rate.is_none());
        let json = summary.to_json();
        assert!(json.contains("\"time_to_eps\""), "{json}");
        assert!(json.contains("\"1e-1\""), "{json}");
    }

    #[test]
    fn summary_handles_zero_data_and_unreached_thresholds() {
        let mut zero = exact_record(0.0, 1.0);
        zero.l2 = 0.0;
        zero.linf = 0.0;
        zero.lp[0].1 = 0.0;
        zero.hs[0].1 = 0.0;
        zero.hsdot[0].1 = 0.0;
        let summary = summarize(&[zero], &context()).unwrap();
        for (_, hits) in &summary.time_to_eps {
            assert_eq!(hits, &[Some(0.0); 3]);
        }

        // Positive data, no decay: thresholds unreached -> None -> JSON null.
        let records = vec![exact_record(0.0, 0.0), exact_record(1.0, 0.0)];
        let summary = summarize(&records, &context()).unwrap();
        let (_, hits) = &summary.time_to_eps[0];
        assert_eq!(hits, &[None; 3]);
        assert!(summary.to_json().contains("null"));
        assert!(summarize(&[], &context()).is_err());
    }
}
