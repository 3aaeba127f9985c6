//! Uniform periodic lattice on a rectangular box, together with its Fourier dual.
//!
//! The box is `[0, l1) x [0, l2)` sampled on an `n1 x n2` lattice (row-major,
//! axis 1 slowest). Wavenumbers follow the usual FFT layout: along axis j the
//! dual lattice is `(2*pi/l_j) * m` with `m = 0, 1, ..., n_j/2 - 1, -n_j/2,
//! ..., -1`; the unpaired Nyquist line sits at `m = -n_j/2`.

use std::sync::Arc;

use crate::error::{AqgError, Result};

/// Default box side `2*pi*16`, i.e. fundamental wavenumber 1/16.
pub const DEFAULT_BOX_SIDE: f64 = 32.0 * std::f64::consts::PI;

/// Coordinate axis of the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    /// 1-based label (1 for `X1`, 2 for `X2`), used in reports.
    pub fn index(self) -> u8 {
        match self {
            Axis::X1 => 1,
            Axis::X2 => 2,
        }
    }
}

/// Uniform periodic lattice; shared behind an `Arc` by every field on it.
#[derive(Debug)]
pub struct Grid {
    n1: usize,
    n2: usize,
    l1: f64,
    l2: f64,
    k1: Vec<f64>,
    k2: Vec<f64>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n1 == other.n1 && self.n2 == other.n2 && self.l1 == other.l1 && self.l2 == other.l2
    }
}

impl Grid {
    pub fn new(n1: usize, n2: usize, l1: f64, l2: f64) -> Result<Arc<Self>> {
        for (name, n) in [("n1", n1), ("n2", n2)] {
            if n < 8 || n % 2 != 0 {
                return Err(AqgError::InvalidParameter(format!(
                    "{name} must be an even integer >= 8, got {n}"
                )));
            }
        }
        for (name, l) in [("l1", l1), ("l2", l2)] {
            if !l.is_finite() || l <= 0.0 {
                return Err(AqgError::InvalidParameter(format!(
                    "{name} must be a positive finite length, got {l}"
                )));
            }
        }
        let wavenumbers = |n: usize, l: f64| -> Vec<f64> {
            let base = 2.0 * std::f64::consts::PI / l;
            (0..n)
                .map(|i| {
                    let m = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
                    base * m as f64
                })
                .collect()
        };
        Ok(Arc::new(Grid {
            n1,
            n2,
            l1,
            l2,
            k1: wavenumbers(n1, l1),
            k2: wavenumbers(n2, l2),
        }))
    }

    /// Square grid on an `l x l` box.
    pub fn square(n: usize, l: f64) -> Result<Arc<Self>> {
        Grid::new(n, n, l, l)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    pub fn l1(&self) -> f64 {
        self.l1
    }
    pub fn l2(&self) -> f64 {
        self.l2
    }

    /// Number of lattice points, `n1 * n2`.
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major flat index of lattice point `(i1, i2)`.
    #[inline]
    pub fn idx(&self, i1: usize, i2: usize) -> usize {
        i1 * self.n2 + i2
    }

    /// Physical coordinates of lattice point `(i1, i2)`.
    #[inline]
    pub fn x(&self, i1: usize, i2: usize) -> (f64, f64) {
        (
            i1 as f64 * self.l1 / self.n1 as f64,
            i2 as f64 * self.l2 / self.n2 as f64,
        )
    }

    /// Wavenumber pair at spectral index `(i1, i2)`.
    #[inline]
    pub fn k(&self, i1: usize, i2: usize) -> (f64, f64) {
        (self.k1[i1], self.k2[i2])
    }

    #[inline]
    pub fn k1_at(&self, i1: usize) -> f64 {
        self.k1[i1]
    }

    #[inline]
    pub fn k2_at(&self, i2: usize) -> f64 {
        self.k2[i2]
    }

    /// Signed integer mode index `m` along `axis` for spectral index `i`.
    #[inline]
    pub fn mode(&self, i: usize, axis: Axis) -> i64 {
        let n = match axis {
            Axis::X1 => self.n1,
            Axis::X2 => self.n2,
        };
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Spectral index holding mode `(m1, m2)`, if the lattice contains it.
    pub fn index_of_mode(&self, m1: i64, m2: i64) -> Option<usize> {
        let half = |n: usize| n as i64 / 2;
        if m1 < -half(self.n1) || m1 >= half(self.n1) || m2 < -half(self.n2) || m2 >= half(self.n2)
        {
            return None;
        }
        let i1 = m1.rem_euclid(self.n1 as i64) as usize;
        let i2 = m2.rem_euclid(self.n2 as i64) as usize;
        Some(self.idx(i1, i2))
    }

    /// Quadrature cell area `(l1/n1) * (l2/n2)`; also the forward-transform weight.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        (self.l1 / self.n1 as f64) * (self.l2 / self.n2 as f64)
    }

    /// Box area `l1 * l2`.
    #[inline]
    pub fn area(&self) -> f64 {
        self.l1 * self.l2
    }

    /// Smallest grid spacing, used by the advective CFL bound.
    pub fn min_spacing(&self) -> f64 {
        (self.l1 / self.n1 as f64).min(self.l2 / self.n2 as f64)
    }

    /// Fundamental wavenumber `2*pi / max(l1, l2)`: the unit in which split
    /// thresholds are configured.
    pub fn fundamental(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.l1.max(self.l2)
    }

    /// Nyquist wavenumbers `(pi*n1/l1, pi*n2/l2)`.
    pub fn nyquist(&self) -> (f64, f64) {
        (
            std::f64::consts::PI * self.n1 as f64 / self.l1,
            std::f64::consts::PI * self.n2 as f64 / self.l2,
        )
    }

    /// Whether `(i1, i2)` lies on an unpaired Nyquist line.
    #[inline]
    pub fn is_nyquist(&self, i1: usize, i2: usize) -> bool {
        i1 == self.n1 / 2 || i2 == self.n2 / 2
    }

    /// Flat index of `-k` for the spectral index `(i1, i2)`.
    #[inline]
    pub fn conj_idx(&self, i1: usize, i2: usize) -> usize {
        let j1 = if i1 == 0 { 0 } else { self.n1 - i1 };
        let j2 = if i2 == 0 { 0 } else { self.n2 - i2 };
        self.idx(j1, j2)
    }

    /// 2/3-rule membership: keep `|k_j| <= (2/3) * k_j^Nyquist` on both axes.
    /// Integer arithmetic (`3|m_j| <= n_j`) so the cutoff carries no float fuzz.
    #[inline]
    pub fn in_dealias_box(&self, i1: usize, i2: usize) -> bool {
        let m1 = self.mode(i1, Axis::X1).unsigned_abs();
        let m2 = self.mode(i2, Axis::X2).unsigned_abs();
        3 * m1 <= self.n1 as u64 && 3 * m2 <= self.n2 as u64
    }

    /// Largest mode index kept by the 2/3 rule along each axis.
    pub fn dealias_limits(&self) -> (u64, u64) {
        (self.n1 as u64 / 3, self.n2 as u64 / 3)
    }
}
