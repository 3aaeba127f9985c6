//! Fourier-multiplier operators and the pseudo-spectral nonlinear term.
//!
//! Directional dissipation `| d_i |^r`, isotropic `|grad|^s`, the Riesz
//! velocity law `u = (-R2 theta, R1 theta)`, the 2/3-rule dealias projector,
//! and `u . grad theta` computed by transform / pointwise product / transform.
//! Odd-symmetric symbols (Riesz, gradient) are zeroed on the Nyquist lines,
//! where they would break conjugate symmetry.

use num_complex::Complex64;

use crate::error::{AqgError, Result};
use crate::fft::{forward_transform, inverse_transform};
use crate::field::{PhysicalField, SpectralField, VelocityPair};
use crate::grid::Axis;

/// Multiplier `|k_axis|^r`, `r >= 0`. The `k_axis = 0` modes are multiplied
/// by 0 when `r > 0` and by 1 when `r = 0` (identity).
pub fn fractional_directional(field: &SpectralField, axis: Axis, r: f64) -> Result<SpectralField> {
    if !r.is_finite() || r < 0.0 {
        return Err(AqgError::InvalidParameter(format!(
            "fractional_directional requires r >= 0, got {r}"
        )));
    }
    let g = field.grid().clone();
    let mut out = field.coeffs().to_vec();
    for i1 in 0..g.n1() {
        for i2 in 0..g.n2() {
            let ka = match axis {
                Axis::X1 => g.k1_at(i1),
                Axis::X2 => g.k2_at(i2),
            };
            let m = directional_weight(ka, r);
            out[g.idx(i1, i2)] *= m;
        }
    }
    Ok(SpectralField::from_raw(g, out))
}

#[inline]
pub(crate) fn directional_weight(ka: f64, r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else if ka == 0.0 {
        0.0
    } else {
        ka.abs().powf(r)
    }
}

/// Multiplier `|k|^s`. The mean mode is set to 0 for `s != 0`; negative `s`
/// requires a mean-free field (the Riesz potential is undefined on the mean).
pub fn fractional_isotropic(field: &SpectralField, s: f64) -> Result<SpectralField> {
    if !s.is_finite() {
        return Err(AqgError::InvalidParameter("s must be finite".into()));
    }
    if s < 0.0 && !field.is_mean_free() {
        return Err(AqgError::NonzeroMean {
            mean: field.mean_coefficient().norm(),
        });
    }
    let g = field.grid().clone();
    let mut out = field.coeffs().to_vec();
    for i1 in 0..g.n1() {
        for i2 in 0..g.n2() {
            let (k1, k2) = g.k(i1, i2);
            let k = k1.hypot(k2);
            let idx = g.idx(i1, i2);
            if k == 0.0 {
                if s != 0.0 {
                    out[idx] = Complex64::new(0.0, 0.0);
                }
            } else if s != 0.0 {
                out[idx] *= k.powf(s);
            }
        }
    }
    Ok(SpectralField::from_raw(g, out))
}

/// Velocity law: `u1hat = -(i k2/|k|) thetahat`, `u2hat = (i k1/|k|) thetahat`,
/// zero at `k = 0` and on the Nyquist lines (odd symbols).
pub fn riesz_velocity(theta: &SpectralField) -> VelocityPair {
    let g = theta.grid().clone();
    let mut u1 = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut u2 = vec![Complex64::new(0.0, 0.0); g.len()];
    for i1 in 0..g.n1() {
        for i2 in 0..g.n2() {
            if g.is_nyquist(i1, i2) {
                continue;
            }
            let (k1, k2) = g.k(i1, i2);
            let k = k1.hypot(k2);
            if k == 0.0 {
                continue;
            }
            let idx = g.idx(i1, i2);
            let th = theta.coeffs()[idx];
            let i_th = Complex64::new(-th.im, th.re); // i * th
            u1[idx] = -(k2 / k) * i_th;
            u2[idx] = (k1 / k) * i_th;
        }
    }
    VelocityPair {
        u1: SpectralField::from_raw(g.clone(), u1),
        u2: SpectralField::from_raw(g, u2),
    }
}

/// Spectral gradient `(i k1 thetahat, i k2 thetahat)`, Nyquist lines zeroed.
pub fn spectral_gradient(field: &SpectralField) -> (SpectralField, SpectralField) {
    let g = field.grid().clone();
    let mut g1 = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut g2 = vec![Complex64::new(0.0, 0.0); g.len()];
    for i1 in 0..g.n1() {
        for i2 in 0..g.n2() {
            if g.is_nyquist(i1, i2) {
                continue;
            }
            let (k1, k2) = g.k(i1, i2);
            let idx = g.idx(i1, i2);
            let c = field.coeffs()[idx];
            let i_c = Complex64::new(-c.im, c.re);
            g1[idx] = k1 * i_c;
            g2[idx] = k2 * i_c;
        }
    }
    (
        SpectralField::from_raw(g.clone(), g1),
        SpectralField::from_raw(g, g2),
    )
}

/// 2/3-rule projector: coefficients with `|k_j| > (2/3) k_j^Nyquist` on either
/// axis are zeroed; the rest pass through unchanged.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let g = field.grid().clone();
    let mut out = field.coeffs().to_vec();
    for i1 in 0..g.n1() {
        for i2 in 0..g.n2() {
            if !g.in_dealias_box(i1, i2) {
                out[g.idx(i1, i2)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    SpectralField::from_raw(g, out)
}

/// `F(u . grad theta)`, dealiased: velocities and gradient components go to
/// physical space, are multiplied pointwise, and the product is transformed
/// back. For band-limited input under the 2/3 box the result is the exact
/// truncated convolution, which is what makes `<u.grad theta, theta> = 0`
/// hold to rounding and the nonlinear term drop from the L2 budget.
pub fn nonlinear_term(theta: &SpectralField) -> Result<SpectralField> {
    nonlinear_term_with_speed(theta).map(|(adv, _)| adv)
}

/// [`nonlinear_term`] plus the pointwise maximum speed `max|u|` of the
/// transporting velocity, which the time stepper needs for its CFL check and
/// gets here for free from the physical-space velocities.
pub fn nonlinear_term_with_speed(theta: &SpectralField) -> Result<(SpectralField, f64)> {
    let velocity = riesz_velocity(theta);
    let (g1, g2) = spectral_gradient(theta);
    let u1 = inverse_transform(&velocity.u1)?;
    let u2 = inverse_transform(&velocity.u2)?;
    let d1 = inverse_transform(&g1)?;
    let d2 = inverse_transform(&g2)?;
    let grid = theta.grid().clone();
    let mut prod = Vec::with_capacity(grid.len());
    let mut max_speed_sq = 0.0f64;
    for idx in 0..grid.len() {
        let (v1, v2) = (u1.values()[idx], u2.values()[idx]);
        max_speed_sq = max_speed_sq.max(v1 * v1 + v2 * v2);
        prod.push(v1 * d1.values()[idx] + v2 * d2.values()[idx]);
    }
    let advection = forward_transform(&PhysicalField::new(grid, prod)?)?;
    Ok((dealias(&advection), max_speed_sq.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn sin_x1(g: &Arc<Grid>) -> SpectralField {
        let f = PhysicalField::from_fn(g.clone(), |x1, _| x1.sin()).unwrap();
        forward_transform(&f).unwrap()
    }

    #[test]
    fn directional_r0_is_identity() {
        let g = Grid::square(16, 2.0 * PI).unwrap();
        let f = sin_x1(&g);
        let out = fractional_directional(&f, Axis::X1, 0.0).unwrap();
        for (a, b) in out.coeffs().iter().zip(f.coeffs()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn directional_on_unit_wavenumber_is_identity() {
        // sin(x1) on the 2*pi box is supported on |k1| = 1.
        let g = Grid::square(16, 2.0 * PI).unwrap();
        let f = sin_x1(&g);
        let out = fractional_directional(&f, Axis::X1, 1.0).unwrap();
        let worst = out
            .coeffs()
            .iter()
            .zip(f.coeffs())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(worst < 1e-12 * f.max_abs());
    }

    #[test]
    fn directional_null_direction_annihilates() {
        let g = Grid::square(16, 2.0 * PI).unwrap();
        let f = sin_x1(&g); // support has k2 = 0
        let out = fractional_directional(&f, Axis::X2, 1.2).unwrap();
        assert!(out.max_abs() < 1e-14 * f.max_abs());
    }

    #[test]
    fn directional_rejects_negative_order() {
        let g = Grid::square(16, 2.0 * PI).unwrap();
        let f = sin_x1(&g);
        assert!(fractional_directional(&f, Axis::X1, -0.5).is_err());
    }

    #[test]
    fn isotropic_halves_single_mode_of_modulus_two() {
        // k = (2*pi/l1, 0) with l1 = pi gives |k| = 2; s = -1 halves it.
        let g = Grid::new(16, 16, PI, PI).unwrap();
        let f = PhysicalField::from_fn(g.clone(), |x1, _| (2.0 * x1).sin()).unwrap();
        let spec = forward_transform(&f).unwrap();
        let out = fractional_isotropic(&spec, -1.0).unwrap();
        let idx = g.index_of_mode(1, 0).unwrap();
        assert!((out.coeffs()[idx] - 0.5 * spec.coeffs()[idx]).norm() < 1e-12 * spec.max_abs());
    }

    #[test]
    fn isotropic_rejects_negative_s_on_nonzero_mean() {
        let g = Grid::square(16, 2.0 * PI).unwrap();
        let f = PhysicalField::from_fn(g.clone(), |x1, _| 1.0 + x1.sin()).unwrap();
        let spec = forward_transform(&f).unwrap();
        assert!(matches!(
            fractional_isotropic(&spec, -0.5),
            Err(AqgError::NonzeroMean { .. })
        ));
    }

    #[test]
    fn riesz_of_sin_x1_is_cos_x1_in_u2() {
        let g = Grid::square(32, 2.0 * PI).unwrap();
        let theta = sin_x1(&g);
        let v = riesz_velocity(&theta);
        assert!(v.u1.max_abs() < 1e-13 * theta.max_abs());
        let u2 = inverse_transform(&v.u2).unwrap();
        let expect = PhysicalField::from_fn(g, |x1, _| x1.cos()).unwrap();
        let worst = u2
            .values()
            .iter()
            .zip(expect.values())
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()));
        assert!(worst < 1e-12);
    }

    #[test]
    fn riesz_mirror_case_sin_x2() {
        let g = Grid::square(32, 2.0 * PI).unwrap();
        let f = PhysicalField::from_fn(g.clone(), |_, x2| x2.sin()).unwrap();
        let theta = forward_transform(&f).unwrap();
        let v = riesz_velocity(&theta);
        assert!(v.u2.max_abs() < 1e-13 * theta.max_abs());
        let u1 = inverse_transform(&v.u1).unwrap();
        let expect = PhysicalField::from_fn(g, |_, x2| -x2.cos()).unwrap();
        let worst = u1
            .values()
            .iter()
            .zip(expect.values())
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()));
        assert!(worst < 1e-12);
    }

    #[test]
    fn dealias_kills_nyquist_row_support() {
        let g = Grid::square(8, 2.0 * PI).unwrap();
        let mut f = SpectralField::zeros(g.clone());
        // Field supported only on the m1 = -4 Nyquist row (real there, hence Hermitian).
        for i2 in 0..8 {
            let j2 = if i2 == 0 { 0 } else { 8 - i2 };
            f.coeffs_mut()[g.idx(4, i2)] = Complex64::new(1.0, 0.0);
            f.coeffs_mut()[g.idx(4, j2)] = Complex64::new(1.0, 0.0);
        }
        let out = dealias(&f);
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn nonlinear_term_vanishes_on_one_dimensional_profiles() {
        let g = Grid::square(32, 2.0 * PI).unwrap();
        let profile_x1 =
            PhysicalField::from_fn(g.clone(), |x1, _| x1.sin() + 0.3 * (3.0 * x1).cos()).unwrap();
        let n1 = nonlinear_term(&forward_transform(&profile_x1).unwrap()).unwrap();
        let scale = forward_transform(&profile_x1).unwrap().max_abs();
        assert!(n1.max_abs() < 1e-12 * scale, "x1 profile should be steady");

        let profile_x2 =
            PhysicalField::from_fn(g.clone(), |_, x2| (2.0 * x2).sin() - 0.5 * x2.cos()).unwrap();
        let n2 = nonlinear_term(&forward_transform(&profile_x2).unwrap()).unwrap();
        assert!(n2.max_abs() < 1e-12 * scale, "x2 profile should be steady");
    }

    #[test]
    fn nonlinear_term_output_is_mean_free() {
        let g = Grid::square(32, 2.0 * PI).unwrap();
        let f = PhysicalField::from_fn(g.clone(), |x1, x2| {
            x1.sin() + (2.0 * x2).cos() + 0.4 * (x1 + 2.0 * x2).sin()
        })
        .unwrap();
        let theta = dealias(&forward_transform(&f).unwrap());
        let n = nonlinear_term(&theta).unwrap();
        assert!(n.mean_coefficient().norm() <= 1e-12 * n.max_abs().max(1.0));
    }
}
