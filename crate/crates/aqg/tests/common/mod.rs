//! Brute-force reference implementations the oracle tests compare against.
//! Everything here is written from the defining sums, independent of the FFT
//! and convolution code paths under test.
#![allow(dead_code)] // each test target uses its own subset

use std::sync::Arc;

use aqg::{Axis, Complex64, Grid, PhysicalField, SpectralField};

/// `f̂(k) = Σ_x f(x) e^{−ik·x} · cell_area`, straight O(n⁴) evaluation.
pub fn brute_forward(field: &PhysicalField) -> Vec<Complex64> {
    let grid = field.grid();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for i1 in 0..grid.n1() {
        for i2 in 0..grid.n2() {
            let (k1, k2) = grid.k(i1, i2);
            let mut acc = Complex64::new(0.0, 0.0);
            for j1 in 0..grid.n1() {
                for j2 in 0..grid.n2() {
                    let (x1, x2) = grid.x(j1, j2);
                    let phase = -(k1 * x1 + k2 * x2);
                    acc += field.value(j1, j2) * Complex64::new(phase.cos(), phase.sin());
                }
            }
            out[grid.idx(i1, i2)] = acc * grid.cell_area();
        }
    }
    out
}

/// `f(x) = (1/(l1·l2)) Σ_k f̂(k) e^{+ik·x}`, the matching inverse sum.
pub fn brute_inverse(field: &SpectralField) -> Vec<f64> {
    let grid = field.grid();
    let mut out = vec![0.0; grid.len()];
    for j1 in 0..grid.n1() {
        for j2 in 0..grid.n2() {
            let (x1, x2) = grid.x(j1, j2);
            let mut acc = Complex64::new(0.0, 0.0);
            for i1 in 0..grid.n1() {
                for i2 in 0..grid.n2() {
                    let (k1, k2) = grid.k(i1, i2);
                    let phase = k1 * x1 + k2 * x2;
                    acc += field.coeff(i1, i2) * Complex64::new(phase.cos(), phase.sin());
                }
            }
            out[grid.idx(j1, j2)] = acc.re / grid.area();
        }
    }
    out
}

/// Velocity coefficients from the defining symbols: `û₁ = −i k₂/|k| θ̂`,
/// `û₂ = +i k₁/|k| θ̂`, zero at `k = 0`.
fn brute_velocity(theta: &SpectralField) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = theta.grid();
    let mut u1 = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut u2 = vec![Complex64::new(0.0, 0.0); grid.len()];
    let i = Complex64::new(0.0, 1.0);
    for i1 in 0..grid.n1() {
        for i2 in 0..grid.n2() {
            let (k1, k2) = grid.k(i1, i2);
            let norm = (k1 * k1 + k2 * k2).sqrt();
            if norm == 0.0 {
                continue;
            }
            let c = theta.coeff(i1, i2);
            u1[grid.idx(i1, i2)] = -i * (k2 / norm) * c;
            u2[grid.idx(i1, i2)] = i * (k1 / norm) * c;
        }
    }
    (u1, u2)
}

/// The advection coefficients `ℱ(u·∇θ)(k)` by direct lattice convolution,
/// `(1/(l1·l2)) Σ_q û(k−q)·(i q·θ̂(q))`, alias-free, restricted to the dealias
/// box exactly as the solver's nonlinear term is.
pub fn brute_advection(theta: &SpectralField) -> Vec<Complex64> {
    let grid = theta.grid();
    let (u1, u2) = brute_velocity(theta);
    let i = Complex64::new(0.0, 1.0);
    // Every populated source mode q with its integer label and wavenumber.
    let mut sources = Vec::new();
    for i1 in 0..grid.n1() {
        for i2 in 0..grid.n2() {
            let idx = grid.idx(i1, i2);
            if theta.coeffs()[idx].norm() == 0.0 {
                continue;
            }
            let (k1, k2) = grid.k(i1, i2);
            sources.push((
                grid.mode(i1, Axis::X1),
                grid.mode(i2, Axis::X2),
                idx,
                k1,
                k2,
            ));
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for i1 in 0..grid.n1() {
        for i2 in 0..grid.n2() {
            if !grid.in_dealias_box(i1, i2) {
                continue;
            }
            let (m1, m2) = (grid.mode(i1, Axis::X1), grid.mode(i2, Axis::X2));
            let mut acc = Complex64::new(0.0, 0.0);
            for &(q1, q2, qidx, k1q, k2q) in &sources {
                let Some(pidx) = grid.index_of_mode(m1 - q1, m2 - q2) else {
                    continue;
                };
                let theta_q = theta.coeffs()[qidx];
                acc += u1[pidx] * (i * k1q * theta_q) + u2[pidx] * (i * k2q * theta_q);
            }
            out[grid.idx(i1, i2)] = acc / grid.area();
        }
    }
    out
}

pub fn max_coeff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn grid(n: usize, side: f64) -> Arc<Grid> {
    Grid::square(n, side).unwrap()
}
