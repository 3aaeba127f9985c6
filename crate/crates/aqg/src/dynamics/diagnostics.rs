//! Per-instant diagnostics records, their NDJSON encoding, and the
//! energy-budget verifier.
//!
//! One record is one JSON object on one line, with flat keys: `t, l2, linf,
//! lp.<p>, hs.<s>, hsdot.<s>, diss1, diss2, cum1, cum2, split.<delta>.low,
//! split.<delta>.high, budget_residual`. `<delta>` is the cutoff as a
//! multiple of the fundamental wavenumber `2π/max(l1,l2)`; `diss1`/`diss2`
//! are the instantaneous squared dissipation norms `‖|∂₁|^α θ‖²_{L²}`,
//! `‖|∂₂|^β θ‖²_{L²}` (unweighted), while `cum1`/`cum2` carry the μ, ν
//! weights so the budget closes for any coefficients.

use serde_json::{Map, Value};

use crate::error::{AqgError, Result};

/// L² norms of the two halves of the frequency split at one cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitNorms {
    /// Cutoff as a multiple of the fundamental wavenumber.
    pub delta_multiple: f64,
    /// `‖w_δ‖_{L²}` (modes with `max(|k₁|,|k₂|) ≤ δ`).
    pub low: f64,
    /// `‖v_δ‖_{L²}` (the complement).
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2: f64,
    pub linf: f64,
    /// `(p, ‖θ‖_{L^p})` pairs, finite exponents only (the sup norm is `linf`).
    pub lp: Vec<(f64, f64)>,
    /// `(s, ‖θ‖_{H^s})` pairs.
    pub hs: Vec<(f64, f64)>,
    /// `(s, ‖θ‖_{Ḣ^s})` pairs.
    pub hsdot: Vec<(f64, f64)>,
    pub diss1: f64,
    pub diss2: f64,
    /// `∫₀ᵗ μ‖|∂₁|^α θ‖²_{L²} dτ` (trapezoidal, per step).
    pub cum1: f64,
    /// `∫₀ᵗ ν‖|∂₂|^β θ‖²_{L²} dτ`.
    pub cum2: f64,
    pub split: Vec<SplitNorms>,
    /// `l2(t)² + 2·cum1(t) + 2·cum2(t) − l2(0)²`.
    pub budget_residual: f64,
}

/// Shortest decimal form, with integral values printed without a fraction so
/// keys read `lp.2`, `split.8.low`.
pub(crate) fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 9.0e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

fn num(x: f64) -> Value {
    debug_assert!(x.is_finite(), "diagnostics must be finite, got {x}");
    Value::from(x)
}

impl DiagnosticsRecord {
    pub fn to_json_line(&self) -> String {
        let mut map = Map::new();
        map.insert("t".into(), num(self.t));
        map.insert("l2".into(), num(self.l2));
        map.insert("linf".into(), num(self.linf));
        for &(p, v) in &self.lp {
            map.insert(format!("lp.{}", fmt_num(p)), num(v));
        }
        for &(s, v) in &self.hs {
            map.insert(format!("hs.{}", fmt_num(s)), num(v));
        }
        for &(s, v) in &self.hsdot {
            map.insert(format!("hsdot.{}", fmt_num(s)), num(v));
        }
        map.insert("diss1".into(), num(self.diss1));
        map.insert("diss2".into(), num(self.diss2));
        map.insert("cum1".into(), num(self.cum1));
        map.insert("cum2".into(), num(self.cum2));
        for sp in &self.split {
            let d = fmt_num(sp.delta_multiple);
            map.insert(format!("split.{d}.low"), num(sp.low));
            map.insert(format!("split.{d}.high"), num(sp.high));
        }
        map.insert("budget_residual".into(), num(self.budget_residual));
        serde_json::to_string(&Value::Object(map)).expect("record serialization cannot fail")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(line)
            .map_err(|e| AqgError::Records(format!("invalid JSON: {e}")))?;
        let Value::Object(map) = value else {
            return Err(AqgError::Records("record line is not a JSON object".into()));
        };
        let mut scalars: std::collections::HashMap<&str, f64> = std::collections::HashMap::new();
        let mut lp = Vec::new();
        let mut hs = Vec::new();
        let mut hsdot = Vec::new();
        // (multiple, low, high); low/high filled as their keys arrive.
        let mut split: Vec<(f64, Option<f64>, Option<f64>)> = Vec::new();
        for (key, val) in &map {
            let x = val
                .as_f64()
                .ok_or_else(|| AqgError::Records(format!("field {key} is not a number")))?;
            let indexed = |rest: &str, dest: &mut Vec<(f64, f64)>| -> Result<()> {
                let idx: f64 = rest
                    .parse()
                    .map_err(|_| AqgError::Records(format!("bad index in field {key}")))?;
                dest.push((idx, x));
                Ok(())
            };
            match key.as_str() {
                "t" | "l2" | "linf" | "diss1" | "diss2" | "cum1" | "cum2" | "budget_residual" => {
                    scalars.insert(key.as_str(), x);
                }
                k if k.starts_with("lp.") => indexed(&k[3..], &mut lp)?,
                k if k.starts_with("hsdot.") => indexed(&k[6..], &mut hsdot)?,
                k if k.starts_with("hs.") => indexed(&k[3..], &mut hs)?,
                k if k.starts_with("split.") => {
                    let rest = &k[6..];
                    let (mult_str, is_low) = if let Some(m) = rest.strip_suffix(".low") {
                        (m, true)
                    } else if let Some(m) = rest.strip_suffix(".high") {
                        (m, false)
                    } else {
                        return Err(AqgError::Records(format!(
                            "split field {key} must end in .low or .high"
                        )));
                    };
                    let mult: f64 = mult_str
                        .parse()
                        .map_err(|_| AqgError::Records(format!("bad cutoff in field {key}")))?;
                    let entry = match split.iter_mut().find(|(m, _, _)| *m == mult) {
                        Some(e) => e,
                        None => {
                            split.push((mult, None, None));
                            split.last_mut().unwrap()
                        }
                    };
                    if is_low {
                        entry.1 = Some(x);
                    } else {
                        entry.2 = Some(x);
                    }
                }
                other => {
                    return Err(AqgError::Records(format!("unknown field {other}")));
                }
            }
        }
        for req in [
            "t", "l2", "linf", "diss1", "diss2", "cum1", "cum2", "budget_residual",
        ] {
            if !scalars.contains_key(req) {
                return Err(AqgError::Records(format!("missing field {req}")));
            }
        }
        let split = split
            .into_iter()
            .map(|(m, low, high)| match (low, high) {
                (Some(low), Some(high)) => Ok(SplitNorms {
                    delta_multiple: m,
                    low,
                    high,
                }),
                _ => Err(AqgError::Records(format!(
                    "split.{} is missing its .low or .high half",
                    fmt_num(m)
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagnosticsRecord {
            t: scalars["t"],
            l2: scalars["l2"],
            linf: scalars["linf"],
            lp,
            hs,
            hsdot,
            diss1: scalars["diss1"],
            diss2: scalars["diss2"],
            cum1: scalars["cum1"],
            cum2: scalars["cum2"],
            split,
            budget_residual: scalars["budget_residual"],
        })
    }

    fn lookup(pairs: &[(f64, f64)], idx: f64) -> Option<f64> {
        pairs
            .iter()
            .find(|(i, _)| (i - idx).abs() <= 1e-9 * idx.abs().max(1.0))
            .map(|&(_, v)| v)
    }

    pub fn lp_value(&self, p: f64) -> Option<f64> {
        Self::lookup(&self.lp, p)
    }

    pub fn hs_value(&self, s: f64) -> Option<f64> {
        Self::lookup(&self.hs, s)
    }

    pub fn hsdot_value(&self, s: f64) -> Option<f64> {
        Self::lookup(&self.hsdot, s)
    }

    pub fn find_split(&self, delta_multiple: f64) -> Option<&SplitNorms> {
        self.split
            .iter()
            .find(|sp| (sp.delta_multiple - delta_multiple).abs() <= 1e-9 * delta_multiple.abs().max(1.0))
    }
}

/// Worst energy-budget residual over a run:
/// `residual(t) = l2(t)² + 2·cum1(t) + 2·cum2(t) − l2(0)²`, returned signed,
/// selected by largest absolute value. Exact time integration gives 0; the
/// trapezoidal rule leaves O(dt²), the stepper O(dt⁴).
pub fn energy_budget(records: &[DiagnosticsRecord]) -> Result<f64> {
    let first = records.first().ok_or_else(|| {
        AqgError::InvalidParameter("energy budget needs at least one record".into())
    })?;
    let l2_0_sq = first.l2 * first.l2;
    let mut worst = 0.0f64;
    for r in records {
        let residual = r.l2 * r.l2 + 2.0 * r.cum1 + 2.0 * r.cum2 - l2_0_sq;
        if residual.abs() > worst.abs() {
            worst = residual;
        }
    }
    Ok(worst)
}
