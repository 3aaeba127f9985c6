//! Structural identities of the spectral machinery, property-tested over the
//! seeded random-field family.

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use aqg::{
    dealias, forward_transform, fractional_directional, fractional_isotropic,
    gaussian_envelope_field, inner_product, inverse_transform, l2_norm, linear_propagator,
    nonlinear_term, riesz_velocity, sobolev_norm, split_norms, Axis, DissipationParams, Grid,
    PhysicalField, SpectralField,
};

fn grid16() -> Arc<Grid> {
    Grid::square(16, 2.0 * PI).unwrap()
}

fn field(grid: &Arc<Grid>, seed: u64, gamma: f64) -> SpectralField {
    gaussian_envelope_field(grid, gamma, 1, 5, 1.0, seed).unwrap()
}

fn max_coeff_gap(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn physical_round_trip_is_exact(values in prop::collection::vec(-10.0f64..10.0, 64)) {
        let grid = Grid::square(8, 2.0 * PI).unwrap();
        let f = PhysicalField::new(grid.clone(), values).unwrap();
        let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
        let scale = f.max_abs().max(1.0);
        for i1 in 0..grid.n1() {
            for i2 in 0..grid.n2() {
                prop_assert!((f.value(i1, i2) - back.value(i1, i2)).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn spectral_round_trip_is_exact(seed in any::<u64>(), gamma in 0.5f64..3.0) {
        let grid = grid16();
        let f = field(&grid, seed, gamma);
        let back = forward_transform(&inverse_transform(&f).unwrap()).unwrap();
        prop_assert!(max_coeff_gap(&f, &back) <= 1e-12 * f.max_abs().max(1e-300));
    }

    #[test]
    fn parseval_ties_both_norm_evaluations(seed in any::<u64>(), gamma in 0.5f64..3.0) {
        let grid = grid16();
        let f = field(&grid, seed, gamma);
        let spectral_sq = l2_norm(&f).powi(2);
        let phys = inverse_transform(&f).unwrap();
        let quadrature_sq: f64 =
            phys.values().iter().map(|v| v * v).sum::<f64>() * grid.cell_area();
        let scale = spectral_sq.max(1e-300);
        prop_assert!((spectral_sq - quadrature_sq).abs() <= 1e-12 * scale);
    }

    #[test]
    fn directional_weights_compose(
        seed in any::<u64>(),
        r1 in 0.0f64..2.0,
        r2 in 0.0f64..2.0,
    ) {
        let grid = grid16();
        let f = field(&grid, seed, 2.0);
        for axis in [Axis::X1, Axis::X2] {
            let once = fractional_directional(
                &fractional_directional(&f, axis, r1).unwrap(), axis, r2,
            ).unwrap();
            let joint = fractional_directional(&f, axis, r1 + r2).unwrap();
            prop_assert!(max_coeff_gap(&once, &joint) <= 1e-11 * joint.max_abs().max(1e-300));
        }
    }

    #[test]
    fn riesz_velocity_is_divergence_free(seed in any::<u64>(), gamma in 0.5f64..3.0) {
        let grid = grid16();
        let f = field(&grid, seed, gamma);
        prop_assert!(riesz_velocity(&f).divergence_defect() <= 1e-13);
    }

    #[test]
    fn dealias_is_an_orthogonal_projection(seed in any::<u64>(), amp in 0.1f64..2.0) {
        let grid = grid16();
        // A band-limited draw plus a Hermitian pair beyond the dealias box.
        let mut coeffs = field(&grid, seed, 1.0).coeffs().to_vec();
        let plus = grid.index_of_mode(7, 0).unwrap();
        let minus = grid.index_of_mode(-7, 0).unwrap();
        let c = aqg::Complex64::new(0.0, -0.5 * amp * grid.area());
        coeffs[plus] = c;
        coeffs[minus] = c.conj();
        let f = SpectralField::from_coefficients(grid.clone(), coeffs).unwrap();
        let once = dealias(&f);
        prop_assert!(once.coeffs()[plus].norm() == 0.0);
        let twice = dealias(&once);
        prop_assert_eq!(once.coeffs(), twice.coeffs());
        let total = l2_norm(&f).powi(2);
        let kept = l2_norm(&once).powi(2);
        prop_assert!(kept <= total * (1.0 + 1e-15));
        // A band-limited field inside the box is untouched.
        let inside = field(&grid, seed, 1.0);
        let projected = dealias(&inside);
        prop_assert_eq!(projected.coeffs(), inside.coeffs());
    }

    #[test]
    fn transport_conserves_energy_discretely(seed in any::<u64>(), gamma in 0.5f64..3.0) {
        let grid = grid16();
        let theta = field(&grid, seed, gamma);
        let adv = nonlinear_term(&theta).unwrap();
        let pairing = inner_product(&adv, &theta).unwrap();
        let scale = (l2_norm(&adv) * l2_norm(&theta)).max(1e-300);
        prop_assert!(pairing.abs() <= 1e-10 * scale, "defect {}", pairing.abs() / scale);
    }

    #[test]
    fn splitting_is_pythagorean(seed in any::<u64>(), multiple in 1.0f64..8.0) {
        let grid = grid16();
        let f = field(&grid, seed, 2.0);
        let delta = multiple * grid.fundamental();
        let (low, high) = split_norms(&f, delta);
        let total = l2_norm(&f).powi(2);
        prop_assert!((low * low + high * high - total).abs() <= 1e-12 * total.max(1e-300));
    }

    #[test]
    fn sobolev_norms_are_monotone_in_the_index(
        seed in any::<u64>(),
        s in 0.0f64..3.0,
        ds in 0.0f64..2.0,
    ) {
        let grid = grid16();
        let f = field(&grid, seed, 2.0);
        prop_assert!(sobolev_norm(&f, s) <= sobolev_norm(&f, s + ds) * (1.0 + 1e-13));
    }

    #[test]
    fn linear_propagators_form_a_semigroup(
        seed in any::<u64>(),
        h1 in 0.0f64..0.7,
        h2 in 0.0f64..0.7,
        alpha in 0.1f64..0.9,
        beta in 0.1f64..0.9,
    ) {
        let grid = grid16();
        let params = DissipationParams::new(0.8, 1.3, alpha, beta).unwrap();
        let f = field(&grid, seed, 2.0);
        let joint = linear_propagator(&f, &params, h1 + h2).unwrap();
        let composed =
            linear_propagator(&linear_propagator(&f, &params, h1).unwrap(), &params, h2).unwrap();
        prop_assert!(max_coeff_gap(&joint, &composed) <= 1e-12 * f.max_abs().max(1e-300));
    }

    #[test]
    fn isotropic_powers_invert_on_mean_free_fields(seed in any::<u64>(), s in 0.1f64..2.0) {
        let grid = grid16();
        let f = field(&grid, seed, 2.0);
        let up = fractional_isotropic(&f, s).unwrap();
        let back = fractional_isotropic(&up, -s).unwrap();
        prop_assert!(max_coeff_gap(&f, &back) <= 1e-11 * f.max_abs().max(1e-300));
    }
}
