//! Real-space and spectral fields on a [`Grid`].
//!
//! A `SpectralField` stores the full complex coefficient lattice under the
//! quadrature convention of [`crate::fft`]; real fields are represented by
//! Hermitian-symmetric coefficients. The unpaired Nyquist lines are zeroed
//! whenever coefficients enter from outside (they cannot carry odd-symmetric
//! differentiation symbols).

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{AqgError, Result};
use crate::grid::Grid;

/// Relative Hermitian-symmetry defect accepted on input coefficients.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Real samples on the lattice.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl PhysicalField {
    /// Wrap raw samples, rejecting non-finite entries with their index.
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(AqgError::InvalidParameter(format!(
                "sample count {} does not match grid {}x{}",
                values.len(),
                grid.n1(),
                grid.n2()
            )));
        }
        for (flat, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(AqgError::NonFiniteSample {
                    i1: flat / grid.n2(),
                    i2: flat % grid.n2(),
                    value: v,
                });
            }
        }
        Ok(PhysicalField { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        PhysicalField { grid, values: vec![0.0; n] }
    }

    /// Sample a closure over the lattice points.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i1 in 0..grid.n1() {
            for i2 in 0..grid.n2() {
                let (x1, x2) = grid.x(i1, i2);
                values.push(f(x1, x2));
            }
        }
        PhysicalField::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, i1: usize, i2: usize) -> f64 {
        self.values[self.grid.idx(i1, i2)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Complex coefficients on the dual lattice (full layout, Hermitian for real fields).
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        SpectralField { grid, coeffs: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Internal constructor for coefficients produced by the crate's own
    /// transforms and multipliers, which preserve the invariants.
    pub(crate) fn from_raw(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid, coeffs }
    }

    /// Wrap externally supplied coefficients: Hermitian symmetry is required
    /// (defect <= `SYMMETRY_TOL` relative) and the Nyquist lines are zeroed so
    /// that odd differentiation symbols stay conjugate-symmetric.
    pub fn from_coefficients(grid: Arc<Grid>, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(AqgError::InvalidParameter(format!(
                "coefficient count {} does not match grid {}x{}",
                coeffs.len(),
                grid.n1(),
                grid.n2()
            )));
        }
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if !scale.is_finite() {
            return Err(AqgError::InvalidParameter(
                "non-finite spectral coefficient".into(),
            ));
        }
        let defect = symmetry_defect(&grid, &coeffs);
        if defect > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(AqgError::SymmetryViolation {
                defect,
                limit: SYMMETRY_TOL * scale,
            });
        }
        for i1 in 0..grid.n1() {
            for i2 in 0..grid.n2() {
                if grid.is_nyquist(i1, i2) {
                    coeffs[grid.idx(i1, i2)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub(crate) fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn coeff(&self, i1: usize, i2: usize) -> Complex64 {
        self.coeffs[self.grid.idx(i1, i2)]
    }

    /// Coefficient at `k = 0` (the mean times the box area).
    pub fn mean_coefficient(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    /// Field scaled by a real factor.
    pub fn scaled(&self, factor: f64) -> SpectralField {
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// True when the `k = 0` coefficient is negligible against the field scale.
    pub fn is_mean_free(&self) -> bool {
        self.coeffs[0].norm() <= 1e-10 * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Largest Hermitian defect `|c(-k) - conj(c(k))|` over the lattice.
    pub fn symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.grid, &self.coeffs)
    }

    pub(crate) fn assert_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.as_ref() == other.grid.as_ref() {
            Ok(())
        } else {
            Err(AqgError::GridMismatch)
        }
    }
}

fn symmetry_defect(grid: &Grid, coeffs: &[Complex64]) -> f64 {
    let mut defect = 0.0f64;
    for i1 in 0..grid.n1() {
        for i2 in 0..grid.n2() {
            let a = coeffs[grid.idx(i1, i2)];
            let b = coeffs[grid.conj_idx(i1, i2)];
            defect = defect.max((b - a.conj()).norm());
        }
    }
    defect
}

/// The divergence-free velocity pair `(u1, u2) = (-R2 theta, R1 theta)`.
#[derive(Clone, Debug)]
pub struct VelocityPair {
    pub u1: SpectralField,
    pub u2: SpectralField,
}

impl VelocityPair {
    /// Largest pointwise divergence `|k1*u1 + k2*u2|` relative to the
    /// velocity scale; the defining invariant keeps this at rounding level.
    pub fn divergence_defect(&self) -> f64 {
        let g = self.u1.grid();
        let scale = self.u1.max_abs().max(self.u2.max_abs()).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i1 in 0..g.n1() {
            for i2 in 0..g.n2() {
                let (k1, k2) = g.k(i1, i2);
                let idx = g.idx(i1, i2);
                let div = k1 * self.u1.coeffs()[idx] + k2 * self.u2.coeffs()[idx];
                worst = worst.max(div.norm() / scale);
            }
        }
        worst
    }

    /// Max pointwise speed `max_x |u(x)|`, for the CFL bound.
    pub fn max_speed(&self) -> Result<f64> {
        let u1 = crate::fft::inverse_transform(&self.u1)?;
        let u2 = crate::fft::inverse_transform(&self.u2)?;
        Ok(u1
            .values()
            .iter()
            .zip(u2.values())
            .fold(0.0f64, |m, (&a, &b)| m.max(a.hypot(b))))
    }
}
