//! Property tests over seeded random inputs.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kdv_core::cnoidal::hk_traveling_wave;
use kdv_core::elliptic::{solve_b, Lattice};
use kdv_core::flows::{momentum, rhs_hk, rhs_kdv, rhs_kdv_potential};
use kdv_core::io::fmt_g17;
use kdv_core::sampling::{smooth_random_field, SmoothFieldSpec};
use kdv_core::schrodinger::{alpha, diagonal_green, product_identity_residual};
use kdv_core::{CnoidalWeierstrass, Field, PeriodicGrid};

fn field(seed: u64, n: usize, amplitude: f64) -> Field {
    let grid = PeriodicGrid::new(2.0, n).unwrap();
    let spec = SmoothFieldSpec::new(5, 2.0, amplitude);
    smooth_random_field(&grid, spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn green_is_positive_and_satisfies_product_identity(seed in any::<u64>(), kappa in 4.0f64..12.0) {
        let q = field(seed, 64, 2.0);
        let gd = diagonal_green(&q, kappa).unwrap();
        prop_assert!(gd.g.min() > 0.0);
        prop_assert!(product_identity_residual(&q, &gd).unwrap() < 1e-8);
    }

    #[test]
    fn green_is_translation_covariant(seed in any::<u64>(), j in 1isize..63) {
        let q = field(seed, 64, 1.0);
        let g = diagonal_green(&q, 6.0).unwrap().g;
        let g_shift = diagonal_green(&q.rotated(j), 6.0).unwrap().g;
        prop_assert!(g_shift.sub(&g.rotated(j)).unwrap().sup_norm() < 1e-11);
    }

    #[test]
    fn alpha_is_nonnegative(seed in any::<u64>(), amplitude in 0.0f64..1.0, kappa in 3.0f64..10.0) {
        let q = field(seed, 64, amplitude);
        prop_assert!(alpha(&q, kappa).unwrap().value >= -1e-13);
    }

    #[test]
    fn branch_point_solves_its_equation(omega3 in 0.6f64..1.6, kappa in 2.0f64..40.0) {
        let lat = Lattice::new(1.0, omega3).unwrap();
        let b = solve_b(kappa, &lat).unwrap().b;
        prop_assert!(b > 0.0 && b < lat.omega1());
        let residual = lat.wp_real(b).unwrap() - lat.e1() - kappa * kappa;
        prop_assert!(residual.abs() <= 1e-10 * kappa * kappa);
    }

    #[test]
    fn cnoidal_green_is_affine_in_profile(omega3 in 0.7f64..1.4, kappa in 4.0f64..16.0) {
        let lat = Lattice::new(1.0, omega3).unwrap();
        let hk = hk_traveling_wave(&lat, kappa).unwrap();
        let w = CnoidalWeierstrass::new(lat);
        let grid = w.grid(64).unwrap();
        let g = diagonal_green(&w.field(&grid, 0.0).unwrap(), kappa).unwrap().g;
        let want = hk.green(&grid).unwrap();
        prop_assert!(g.sub(&want).unwrap().sup_norm() <= 1e-8 * want.sup_norm());
    }

    #[test]
    fn kdv_rhs_preserves_momentum(seed in any::<u64>(), amplitude in 0.1f64..3.0) {
        let u = field(seed, 64, amplitude);
        let r = rhs_kdv(&u);
        prop_assert!(u.inner(&r).unwrap().abs() <= 1e-10 * u.l2_norm() * r.l2_norm());
        prop_assert!(r.integral().abs() <= 1e-12 * r.l2_norm() + 1e-14);
    }

    #[test]
    fn kdv_potential_with_zero_background_is_kdv(seed in any::<u64>()) {
        let q = field(seed, 64, 1.0);
        let zero = Field::zeros(q.grid());
        let (a, b) = (rhs_kdv_potential(&q, &zero).unwrap(), rhs_kdv(&q));
        prop_assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn hk_rhs_integrates_to_zero(seed in any::<u64>(), kappa in 6.0f64..12.0) {
        let q = field(seed, 64, 1.0);
        let r = rhs_hk(&q, kappa).unwrap();
        prop_assert!(r.integral().abs() <= 1e-9 * r.l2_norm());
        // dP/dt = <q, rhs> vanishes along H_kappa.
        prop_assert!(q.inner(&r).unwrap().abs() <= 1e-7 * q.l2_norm() * r.l2_norm());
        prop_assert!(momentum(&q) > 0.0);
    }

    #[test]
    fn g17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
    }
}
