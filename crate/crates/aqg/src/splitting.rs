//! Low/high frequency decomposition through the square cutoff
//! `𝒫(0,δ) = {max(|k₁|,|k₂|) ≤ δ}`, the pointwise high-frequency bound, and
//! the low-frequency growth diagnostics (calibrated envelope constant and
//! log-log rate fit).
//!
//! δ is always an absolute wavenumber here; configuration and records traffic
//! in multiples of the fundamental wavenumber `2π/max(l1,l2)` and convert at
//! the boundary.

use crate::dynamics::diagnostics::DiagnosticsRecord;
use crate::dynamics::params::DissipationParams;
use crate::error::{AqgError, Result};
use crate::field::SpectralField;
use crate::norms::dissipation_pair;

/// Validated frequency-split cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitParams {
    delta: f64,
}

impl SplitParams {
    /// `delta` in absolute wavenumber units. The split is meaningful only when
    /// δ reaches the fundamental wavenumber; below it the low box holds just
    /// the (zero) mean — allowed, not useful.
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(AqgError::InvalidParameter(format!(
                "split cutoff delta must be positive and finite, got {delta}"
            )));
        }
        Ok(SplitParams { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

fn in_box(k1: f64, k2: f64, delta: f64) -> bool {
    k1.abs().max(k2.abs()) <= delta
}

/// `w_δ`: modes with `max(|k₁|,|k₂|) ≤ δ` (inclusive) kept, others zeroed.
pub fn low_pass(field: &SpectralField, delta: f64) -> SpectralField {
    let grid = field.grid().clone();
    let mut out = field.clone();
    let coeffs = out.coeffs_mut();
    for i1 in 0..grid.n1() {
        let k1 = grid.k1_at(i1);
        for i2 in 0..grid.n2() {
            if !in_box(k1, grid.k2_at(i2), delta) {
                coeffs[grid.idx(i1, i2)] = num_complex::Complex64::new(0.0, 0.0);
            }
        }
    }
    out
}

/// `v_δ`: the exact complement, `low_pass(F,δ) + high_pass(F,δ) = F`
/// coefficientwise.
pub fn high_pass(field: &SpectralField, delta: f64) -> SpectralField {
    let grid = field.grid().clone();
    let mut out = field.clone();
    let coeffs = out.coeffs_mut();
    for i1 in 0..grid.n1() {
        let k1 = grid.k1_at(i1);
        for i2 in 0..grid.n2() {
            if in_box(k1, grid.k2_at(i2), delta) {
                coeffs[grid.idx(i1, i2)] = num_complex::Complex64::new(0.0, 0.0);
            }
        }
    }
    out
}

/// `(‖w_δ‖_{L²}, ‖v_δ‖_{L²})` in one pass, no allocation.
pub fn split_norms(field: &SpectralField, delta: f64) -> (f64, f64) {
    let grid = field.grid();
    let mut low = 0.0;
    let mut high = 0.0;
    for i1 in 0..grid.n1() {
        let k1 = grid.k1_at(i1);
        for i2 in 0..grid.n2() {
            let sq = field.coeff(i1, i2).norm_sqr();
            if in_box(k1, grid.k2_at(i2), delta) {
                low += sq;
            } else {
                high += sq;
            }
        }
    }
    let area = grid.area();
    ((low / area).sqrt(), (high / area).sqrt())
}

/// Pointwise high-frequency estimate: returns
/// `(‖v_δ‖²_{L²}, δ^{−2α}‖|∂₁|^α θ‖²_{L²} + δ^{−2β}‖|∂₂|^β θ‖²_{L²})`.
///
/// The left side never exceeds the right beyond rounding: outside the box
/// either `|k₁| > δ` or `|k₂| > δ`, so each retained mode is dominated by one
/// of the two dissipation terms.
pub fn high_freq_bound(
    theta: &SpectralField,
    params: &DissipationParams,
    delta: f64,
) -> (f64, f64) {
    let (_, high) = split_norms(theta, delta);
    let (d1, d2) = dissipation_pair(theta, params);
    let rhs = delta.powf(-2.0 * params.alpha()) * d1 + delta.powf(-2.0 * params.beta()) * d2;
    (high * high, rhs)
}

/// One point of the low-frequency growth study at cutoff δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSample {
    /// Absolute cutoff.
    pub delta: f64,
    /// `‖w_δ(0)‖²_{L²}`.
    pub w0_sq: f64,
    /// `max_t ‖w_δ(t)‖²_{L²}` over the records.
    pub max_w_sq: f64,
    /// `(δ^{2−2α} + δ^{2−2β})·‖θ⁰‖_{L²}·(cum1(end) + cum2(end))` — the shape
    /// of the theoretical growth bound with unit constant.
    pub envelope: f64,
}

impl GrowthSample {
    /// Observed growth `max_t ‖w_δ(t)‖² − ‖w_δ(0)‖²`.
    pub fn growth(&self) -> f64 {
        self.max_w_sq - self.w0_sq
    }
}

/// Extracts one [`GrowthSample`] per cutoff from a run's records.
///
/// `delta_multiples` select `split.<delta>` entries of the records;
/// `fundamental` converts them to absolute wavenumbers for the envelope.
pub fn growth_samples(
    records: &[DiagnosticsRecord],
    theta0_l2: f64,
    params: &DissipationParams,
    delta_multiples: &[f64],
    fundamental: f64,
) -> Result<Vec<GrowthSample>> {
    let first = records.first().ok_or_else(|| {
        AqgError::InvalidParameter("growth study needs at least one record".into())
    })?;
    let last = records.last().expect("nonempty");
    let cum_total = last.cum1 + last.cum2;
    let mut samples = Vec::with_capacity(delta_multiples.len());
    for &mult in delta_multiples {
        let w0 = first.find_split(mult).ok_or_else(|| {
            AqgError::InvalidParameter(format!(
                "records carry no split entry for delta multiple {mult}"
            ))
        })?;
        let mut max_w_sq = 0.0f64;
        for r in records {
            let sp = r.find_split(mult).ok_or_else(|| {
                AqgError::InvalidParameter(format!(
                    "record at t = {} lacks split entry for delta multiple {mult}",
                    r.t
                ))
            })?;
            max_w_sq = max_w_sq.max(sp.low * sp.low);
        }
        let delta = mult * fundamental;
        let a = 2.0 - 2.0 * params.alpha();
        let b = 2.0 - 2.0 * params.beta();
        samples.push(GrowthSample {
            delta,
            w0_sq: w0.low * w0.low,
            max_w_sq,
            envelope: (delta.powf(a) + delta.powf(b)) * theta0_l2 * cum_total,
        });
    }
    Ok(samples)
}

/// Integrated low-frequency estimate at one cutoff:
/// `(max_t ‖w_δ(t)‖², ‖w_δ(0)‖² + c_emp·(δ^{2−2α}+δ^{2−2β})·‖θ⁰‖·(cum1+cum2))`.
///
/// The constant is empirical — calibrate with [`calibrate_c_emp`] and report
/// it; nothing here asserts the inequality.
pub fn low_freq_growth(
    records: &[DiagnosticsRecord],
    theta0_l2: f64,
    params: &DissipationParams,
    delta: f64,
    fundamental: f64,
    c_emp: f64,
) -> Result<(f64, f64)> {
    let samples = growth_samples(
        records,
        theta0_l2,
        params,
        &[delta / fundamental],
        fundamental,
    )?;
    let s = samples[0];
    Ok((s.max_w_sq, s.w0_sq + c_emp * s.envelope))
}

/// Least-squares constant `C` for `growth ≈ C·envelope` over the δ-sequence.
/// `None` when every envelope vanishes (zero data or zero dissipation).
pub fn calibrate_c_emp(samples: &[GrowthSample]) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for s in samples {
        num += s.growth() * s.envelope;
        den += s.envelope * s.envelope;
    }
    (den > 0.0).then(|| num / den)
}

/// Log-log least-squares fit of growth against δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Fitted exponent: `growth ∝ δ^rate`.
    pub rate: f64,
    /// Fitted `ln` prefactor.
    pub log_prefactor: f64,
    /// Number of δ points with positive growth that entered the fit.
    pub points_used: usize,
}

/// Fits `ln growth = rate·ln δ + const` over the samples with positive growth.
/// Fewer than 3 usable points reject the fit.
pub fn fit_growth_rate(samples: &[GrowthSample]) -> Result<RateFit> {
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.growth() > 1e-300)
        .map(|s| (s.delta.ln(), s.growth().ln()))
        .collect();
    if points.len() < 3 {
        return Err(AqgError::InvalidParameter(format!(
            "rate fit needs at least 3 delta values with positive growth, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(AqgError::InvalidParameter(
            "rate fit needs distinct delta values".into(),
        ));
    }
    let rate = (n * sxy - sx * sy) / denom;
    Ok(RateFit {
        rate,
        log_prefactor: (sy - rate * sx) / n,
        points_used: points.len(),
    })
}
