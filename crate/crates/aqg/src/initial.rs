//! Initial conditions. Trigonometric kinds are written directly into the
//! spectrum (exact to rounding); the vortex pair is sampled in physical space,
//! transformed, and truncated to the dealias box.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{AqgError, Result};
use crate::fft::forward_transform;
use crate::field::{PhysicalField, SpectralField};
use crate::grid::Grid;
use crate::operators::dealias;
use crate::randfield::gaussian_envelope_field;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `amplitude * sin(k1 (2π/l1) x1 + k2 (2π/l2) x2)` for the integer mode
    /// pair `k`.
    SingleMode { k: (i64, i64), amplitude: f64 },
    /// Seeded Gaussian field with power envelope `(1+|k|²)^{−gamma}` on the
    /// mode band `kmin ≤ max(|m1|,|m2|) ≤ kmax`.
    RandomBandlimited {
        gamma: f64,
        kmin: u64,
        kmax: u64,
        seed: u64,
        amplitude: f64,
    },
    /// Two opposite-signed Gaussian blobs of the given radius, centered on the
    /// box midline and separated along axis 1.
    VortexPair {
        separation: f64,
        radius: f64,
        amplitude: f64,
    },
    /// `amplitude * Σ_j coeffs[j−1] sin(j (2π/l1) x1)`; an exactly steady
    /// profile of the transport term.
    X1Profile { coeffs: Vec<f64>, amplitude: f64 },
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    if !amplitude.is_finite() {
        return Err(AqgError::InvalidParameter(format!(
            "initial amplitude must be finite, got {amplitude}"
        )));
    }
    Ok(())
}

/// Writes `amp * sin` of the mode `(m1, m2)` into `coeffs` (both conjugate
/// partners). The mode must be inside the dealias box and nonzero.
fn place_sine(grid: &Grid, coeffs: &mut [Complex64], m1: i64, m2: i64, amp: f64) -> Result<()> {
    let (d1, d2) = grid.dealias_limits();
    if m1 == 0 && m2 == 0 {
        return Err(AqgError::InvalidParameter(
            "single-mode wavenumber must be nonzero (states are mean-free)".into(),
        ));
    }
    if m1.unsigned_abs() > d1 || m2.unsigned_abs() > d2 {
        return Err(AqgError::InvalidParameter(format!(
            "mode ({m1}, {m2}) lies outside the dealias box (|m1| <= {d1}, |m2| <= {d2})"
        )));
    }
    let c = Complex64::new(0.0, -0.5 * amp * grid.area());
    coeffs[grid.index_of_mode(m1, m2).expect("inside the box")] += c;
    coeffs[grid.index_of_mode(-m1, -m2).expect("inside the box")] += c.conj();
    Ok(())
}

pub fn generate_initial(ic: &InitialCondition, grid: &Arc<Grid>) -> Result<SpectralField> {
    match ic {
        InitialCondition::SingleMode { k, amplitude } => {
            check_amplitude(*amplitude)?;
            let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
            place_sine(grid, &mut coeffs, k.0, k.1, *amplitude)?;
            Ok(SpectralField::from_raw(grid.clone(), coeffs))
        }
        InitialCondition::RandomBandlimited {
            gamma,
            kmin,
            kmax,
            seed,
            amplitude,
        } => {
            check_amplitude(*amplitude)?;
            gaussian_envelope_field(grid, *gamma, *kmin, *kmax, *amplitude, *seed)
        }
        InitialCondition::VortexPair {
            separation,
            radius,
            amplitude,
        } => {
            check_amplitude(*amplitude)?;
            if !(*separation > 0.0) || !separation.is_finite() {
                return Err(AqgError::InvalidParameter(format!(
                    "vortex separation must be positive, got {separation}"
                )));
            }
            if !(*radius > 0.0) || !radius.is_finite() {
                return Err(AqgError::InvalidParameter(format!(
                    "vortex radius must be positive, got {radius}"
                )));
            }
            let (l1, l2) = (grid.l1(), grid.l2());
            let centers = [
                (0.5 * l1 - 0.5 * separation, 0.5 * l2, *amplitude),
                (0.5 * l1 + 0.5 * separation, 0.5 * l2, -*amplitude),
            ];
            let inv_two_r2 = 1.0 / (2.0 * radius * radius);
            let blob = PhysicalField::from_fn(grid.clone(), |x1, x2| {
                let mut v = 0.0;
                for &(c1, c2, a) in &centers {
                    // Periodic minimum-image separation per axis.
                    let d1 = (x1 - c1).rem_euclid(l1).min((c1 - x1).rem_euclid(l1));
                    let d2 = (x2 - c2).rem_euclid(l2).min((c2 - x2).rem_euclid(l2));
                    v += a * (-(d1 * d1 + d2 * d2) * inv_two_r2).exp();
                }
                v
            })?;
            let mut spec = dealias(&forward_transform(&blob)?);
            // Opposite blobs cancel in the mean to rounding; pin it exactly.
            spec.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
            Ok(spec)
        }
        InitialCondition::X1Profile { coeffs, amplitude } => {
            check_amplitude(*amplitude)?;
            if coeffs.is_empty() {
                return Err(AqgError::InvalidParameter(
                    "x1 profile needs at least one coefficient".into(),
                ));
            }
            if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
                return Err(AqgError::InvalidParameter(format!(
                    "x1 profile coefficients must be finite, got {bad}"
                )));
            }
            let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
            for (j, &c) in coeffs.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                place_sine(grid, &mut out, (j + 1) as i64, 0, amplitude * c)?;
            }
            Ok(SpectralField::from_raw(grid.clone(), out))
        }
    }
}
