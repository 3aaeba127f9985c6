//! Seeded Gaussian random fields with a power-law spectral envelope.
//!
//! Coefficients are drawn shell by shell in the max-norm `|m|_∞ =
//! max(|m1|,|m2|)` of the integer mode indices, in a traversal order that does
//! not depend on the grid size. Two grids over the same box therefore receive
//! identical draws on their shared shells: the 64² member of a seeded family
//! is the 256² member truncated. The resolution-stability checks in [`crate::lemmas`]
//! lean on this — ratio statistics across resolutions differ only by the
//! resolved tail, not by a reshuffle of the whole field.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{AqgError, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

/// SplitMix64 finalizer; used wherever independent streams are derived from a
/// master seed (sweep cells, per-sample lemma draws).
pub(crate) fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Visits the square ring `max(|m1|,|m2|) = l` in a fixed order.
fn for_each_ring_cell(l: i64, mut visit: impl FnMut(i64, i64)) {
    debug_assert!(l >= 1);
    for m2 in -l..=l {
        visit(-l, m2);
    }
    for m1 in (-l + 1)..l {
        visit(m1, -l);
        visit(m1, l);
    }
    for m2 in -l..=l {
        visit(l, m2);
    }
}

/// A mode owns its draw iff it is the canonical member of its `±k` pair.
fn is_canonical(m1: i64, m2: i64) -> bool {
    m1 > 0 || (m1 == 0 && m2 > 0)
}

fn validate_band(grid: &Grid, kmin: u64, kmax: u64) -> Result<(i64, i64)> {
    let (d1, d2) = grid.dealias_limits();
    let limit = d1.min(d2);
    if kmax > limit {
        return Err(AqgError::InvalidParameter(format!(
            "band edge kmax = {kmax} exceeds the dealias limit {limit} of the {}x{} grid",
            grid.n1(),
            grid.n2()
        )));
    }
    let lo = kmin.max(1);
    if lo > kmax {
        return Err(AqgError::InvalidParameter(format!(
            "empty band: kmin = {kmin}, kmax = {kmax}"
        )));
    }
    Ok((lo as i64, kmax as i64))
}

/// Random mean-free field with independent complex-Gaussian coefficients and
/// spectral power envelope `E|c(k)|² = amplitude²·(1+|k|²)^{−gamma}`.
///
/// The band `kmin ≤ max(|m1|,|m2|) ≤ kmax` is given in integer mode units
/// (`kmin = 0` and `kmin = 1` coincide: the mean mode is always excluded);
/// `kmax` must not exceed the dealias limit, so every generated field is safe
/// to feed to the solver or to alias-free product routines. Deterministic in
/// `seed`.
pub fn gaussian_envelope_field(
    grid: &Arc<Grid>,
    gamma: f64,
    kmin: u64,
    kmax: u64,
    amplitude: f64,
    seed: u64,
) -> Result<SpectralField> {
    if !gamma.is_finite() {
        return Err(AqgError::InvalidParameter(format!(
            "envelope exponent gamma must be finite, got {gamma}"
        )));
    }
    if !amplitude.is_finite() {
        return Err(AqgError::InvalidParameter(format!(
            "amplitude must be finite, got {amplitude}"
        )));
    }
    let (lo, hi) = validate_band(grid, kmin, kmax)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for l in lo..=hi {
        for_each_ring_cell(l, |m1, m2| {
            if !is_canonical(m1, m2) {
                return;
            }
            let a: f64 = normal.sample(&mut rng);
            let b: f64 = normal.sample(&mut rng);
            let k1 = m1 as f64 * 2.0 * std::f64::consts::PI / grid.l1();
            let k2 = m2 as f64 * 2.0 * std::f64::consts::PI / grid.l2();
            let sigma = (1.0 + k1 * k1 + k2 * k2).powf(-gamma / 2.0);
            let c = Complex64::new(a, b) * (amplitude * sigma * inv_sqrt2);
            let i = grid
                .index_of_mode(m1, m2)
                .expect("band-validated mode is representable");
            let j = grid
                .index_of_mode(-m1, -m2)
                .expect("band-validated mode is representable");
            coeffs[i] = c;
            coeffs[j] = c.conj();
        });
    }
    Ok(SpectralField::from_raw(Arc::clone(grid), coeffs))
}

/// Closed-form expectation of the L² norm of [`gaussian_envelope_field`]:
/// `E‖f‖²_{L²} = amplitude²·(1/(l1·l2))·Σ_band (1+|k|²)^{−gamma}`, returned as
/// the square root.
pub fn expected_l2(
    grid: &Arc<Grid>,
    gamma: f64,
    kmin: u64,
    kmax: u64,
    amplitude: f64,
) -> Result<f64> {
    let (lo, hi) = validate_band(grid, kmin, kmax)?;
    let mut sum = 0.0;
    for l in lo..=hi {
        for_each_ring_cell(l, |m1, m2| {
            let k1 = m1 as f64 * 2.0 * std::f64::consts::PI / grid.l1();
            let k2 = m2 as f64 * 2.0 * std::f64::consts::PI / grid.l2();
            sum += (1.0 + k1 * k1 + k2 * k2).powf(-gamma);
        });
    }
    Ok(amplitude * (sum / grid.area()).sqrt())
}
