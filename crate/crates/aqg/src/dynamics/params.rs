//! Dissipation parameters and the (alpha, beta) region classification.

use crate::error::{AqgError, Result};

/// Coefficients and fractional orders of the anisotropic dissipation
/// `mu |d1|^(2 alpha) + nu |d2|^(2 beta)`, with `mu, nu > 0` and
/// `alpha, beta` in the open interval (0, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipationParams {
    mu: f64,
    nu: f64,
    alpha: f64,
    beta: f64,
}

impl DissipationParams {
    pub fn new(mu: f64, nu: f64, alpha: f64, beta: f64) -> Result<Self> {
        let mut violations = Vec::new();
        for (name, v) in [("mu", mu), ("nu", nu)] {
            if !v.is_finite() || v <= 0.0 {
                violations.push(format!("{name} must be a positive real, got {v}"));
            }
        }
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() || v <= 0.0 || v >= 1.0 {
                violations.push(format!("{name} must lie in the open interval (0,1), got {v}"));
            }
        }
        if violations.is_empty() {
            Ok(DissipationParams { mu, nu, alpha, beta })
        } else {
            Err(AqgError::Config(violations))
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Linear symbol `lambda(k) = mu |k1|^(2 alpha) + nu |k2|^(2 beta)`.
    #[inline]
    pub fn lambda(&self, k1: f64, k2: f64) -> f64 {
        let a = if k1 == 0.0 { 0.0 } else { self.mu * k1.abs().powf(2.0 * self.alpha) };
        let b = if k2 == 0.0 { 0.0 } else { self.nu * k2.abs().powf(2.0 * self.beta) };
        a + b
    }

    pub fn classify(&self) -> RegionClass {
        classify_region(self.alpha, self.beta).expect("orders validated at construction")
    }
}

/// Which branch of the region condition applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `alpha <= 1/2`: threshold `1/(2 alpha + 1)`.
    LowAlpha,
    /// `alpha > 1/2`: threshold `(1 - alpha)/(2 alpha)`.
    HighAlpha,
}

/// Classification of (alpha, beta) against the strict region condition
/// `beta > threshold(alpha)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionClass {
    pub satisfies_11: bool,
    /// `beta - threshold(alpha)`; positive iff the condition holds.
    pub margin: f64,
    pub branch: Branch,
}

/// Threshold of the region condition: `1/(2 alpha + 1)` for `alpha <= 1/2`,
/// `(1 - alpha)/(2 alpha)` for `alpha > 1/2`. The two formulas agree at
/// `alpha = 1/2` (both give 1/2), so the threshold is continuous. Ties
/// (`margin = 0`) do NOT satisfy the condition: the inequality is strict.
pub fn classify_region(alpha: f64, beta: f64) -> Result<RegionClass> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !v.is_finite() || v <= 0.0 || v >= 1.0 {
            return Err(AqgError::InvalidParameter(format!(
                "{name} must lie in the open interval (0,1), got {v}"
            )));
        }
    }
    let (branch, threshold) = if alpha <= 0.5 {
        (Branch::LowAlpha, 1.0 / (2.0 * alpha + 1.0))
    } else {
        (Branch::HighAlpha, (1.0 - alpha) / (2.0 * alpha))
    };
    let margin = beta - threshold;
    Ok(RegionClass {
        satisfies_11: margin > 0.0,
        margin,
        branch,
    })
}
