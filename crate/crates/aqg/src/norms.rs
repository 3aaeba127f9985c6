//! Lebesgue and Sobolev norms under the quadrature convention.
//!
//! Physical-space norms are Riemann sums with the cell area; spectral norms
//! are weighted coefficient sums divided by the box area (Parseval). The two
//! agree at `p = 2` / `s = 0` to rounding, which several tests pin down.

use crate::dynamics::params::DissipationParams;
use crate::error::{AqgError, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::grid::Axis;
use crate::operators::directional_weight;

/// Lebesgue exponent, `p` in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    pub fn from_f64(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(LpExponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(LpExponent::Finite(p))
        } else {
            Err(AqgError::InvalidParameter(format!(
                "Lp exponent must satisfy p >= 1, got {p}"
            )))
        }
    }
}

/// `(sum |f|^p * cell_area)^(1/p)`; for `p = inf` the lattice max.
pub fn lp_norm(f: &PhysicalField, p: LpExponent) -> f64 {
    match p {
        LpExponent::Infinity => f.max_abs(),
        LpExponent::Finite(p) => {
            let cell = f.grid().cell_area();
            if p == 2.0 {
                // common case, avoid powf
                let s: f64 = f.values().iter().map(|v| v * v).sum();
                (s * cell).sqrt()
            } else {
                let s: f64 = f.values().iter().map(|v| v.abs().powf(p)).sum();
                (s * cell).powf(1.0 / p)
            }
        }
    }
}

/// Spectral L2 norm via Parseval: `sqrt((1/(l1*l2)) sum |fhat|^2)`.
pub fn l2_norm(field: &SpectralField) -> f64 {
    let s: f64 = field.coeffs().iter().map(|c| c.norm_sqr()).sum();
    (s / field.grid().area()).sqrt()
}

/// Real L2 inner product of two real fields, computed spectrally.
pub fn inner_product(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.assert_same_grid(b)?;
    let s: f64 = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x * y.conj()).re)
        .sum();
    Ok(s / a.grid().area())
}

/// Inhomogeneous Sobolev norm with weight `(1 + |k|^2)^s`.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    let g = field.grid();
    let mut acc = 0.0f64;
    for i1 in 0..g.n1() {
        for i2 in 0..g.n2() {
            let (k1, k2) = g.k(i1, i2);
            let w = (1.0 + k1 * k1 + k2 * k2).powf(s);
            acc += w * field.coeffs()[g.idx(i1, i2)].norm_sqr();
        }
    }
    (acc / g.area()).sqrt()
}

/// Homogeneous Sobolev norm with weight `|k|^(2s)`, `k = 0` excluded.
/// Rejects fields with nonzero mean when `s <= 0` (the excluded mode would
/// otherwise carry an undefined or infinite weight).
pub fn homogeneous_norm(field: &SpectralField, s: f64) -> Result<f64> {
    if s <= 0.0 && !field.is_mean_free() {
        return Err(AqgError::NonzeroMean {
            mean: field.mean_coefficient().norm(),
        });
    }
    let g = field.grid();
    let mut acc = 0.0f64;
    for i1 in 0..g.n1() {
        for i2 in 0..g.n2() {
            let (k1, k2) = g.k(i1, i2);
            let ksq = k1 * k1 + k2 * k2;
            if ksq == 0.0 {
                continue;
            }
            let w = if s == 0.0 { 1.0 } else { ksq.powf(s) };
            acc += w * field.coeffs()[g.idx(i1, i2)].norm_sqr();
        }
    }
    Ok((acc / g.area()).sqrt())
}

/// The two instantaneous squared dissipation norms
/// `(|| |d1|^alpha theta ||^2, || |d2|^beta theta ||^2)` (no mu/nu weights).
pub fn dissipation_pair(theta: &SpectralField, params: &DissipationParams) -> (f64, f64) {
    let g = theta.grid();
    let (mut d1, mut d2) = (0.0f64, 0.0f64);
    for i1 in 0..g.n1() {
        for i2 in 0..g.n2() {
            let (k1, k2) = g.k(i1, i2);
            let e = theta.coeffs()[g.idx(i1, i2)].norm_sqr();
            let w1 = directional_weight(k1, params.alpha());
            let w2 = directional_weight(k2, params.beta());
            d1 += w1 * w1 * e;
            d2 += w2 * w2 * e;
        }
    }
    (d1 / g.area(), d2 / g.area())
}

/// Directional seminorm `|| |d_axis|^r f ||_{L2}` as a single weighted sum.
pub fn directional_norm(field: &SpectralField, axis: Axis, r: f64) -> f64 {
    let g = field.grid();
    let mut acc = 0.0f64;
    for i1 in 0..g.n1() {
        for i2 in 0..g.n2() {
            let ka = match axis {
                Axis::X1 => g.k1_at(i1),
                Axis::X2 => g.k2_at(i2),
            };
            let w = directional_weight(ka, r);
            acc += w * w * field.coeffs()[g.idx(i1, i2)].norm_sqr();
        }
    }
    (acc / g.area()).sqrt()
}

/// A norm to evaluate against a field (used by the diagnostics schedule).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormRequest {
    Lp(LpExponent),
    SobolevH(f64),
    HomogeneousH(f64),
    DirectionalDissipation { axis: Axis, exponent: f64 },
}

impl NormRequest {
    /// Evaluate against the spectral field, with the matching physical
    /// samples supplied for the Lebesgue cases.
    pub fn evaluate(&self, spectral: &SpectralField, physical: &PhysicalField) -> Result<f64> {
        match *self {
            NormRequest::Lp(p) => Ok(lp_norm(physical, p)),
            NormRequest::SobolevH(s) => Ok(sobolev_norm(spectral, s)),
            NormRequest::HomogeneousH(s) => homogeneous_norm(spectral, s),
            NormRequest::DirectionalDissipation { axis, exponent } => {
                if exponent < 0.0 {
                    return Err(AqgError::InvalidParameter(
                        "dissipation exponent must be >= 0".into(),
                    ));
                }
                Ok(directional_norm(spectral, axis, exponent))
            }
        }
    }
}
