use super::*;
use crate::sampling::{smooth_random_field, SmoothFieldSpec};
use crate::spectral::{hs_kappa_norm, PeriodicGrid, SobolevIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn grid(period: f64, n: usize) -> PeriodicGrid {
    PeriodicGrid::new(period, n).unwrap()
}

fn random_q(g: &PeriodicGrid, seed: u64, amplitude: f64) -> Field {
    let spec = SmoothFieldSpec::new(6, 2.0, amplitude);
    smooth_random_field(g, spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn free_monodromy() {
    let g = grid(1.0, 16);
    for kappa in [0.5, 2.0, 7.0] {
        let m = monodromy(&Field::zeros(&g), kappa).unwrap().matrix();
        let (c, s) = (kappa.cosh(), kappa.sinh());
        let want = [[c, s / kappa], [kappa * s, c]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - want[i][j]).abs() < 1e-12 * want[i][j].abs().max(1.0));
            }
        }
    }
}

#[test]
fn constant_potential_shifts_energy() {
    let g = grid(1.0, 16);
    let c = 3.0;
    let kappa: f64 = 2.0;
    let m = monodromy(&Field::constant(&g, c), kappa).unwrap().matrix();
    let k = (kappa * kappa + c).sqrt();
    assert!((m[0][0] - k.cosh()).abs() < 1e-12 * k.cosh());
    assert!((m[0][1] - k.sinh() / k).abs() < 1e-12 * k.sinh());
    assert!((m[1][0] - k * k.sinh()).abs() < 1e-12 * k * k.sinh());
}

#[test]
fn determinant_is_one() {
    let g = grid(2.0, 64);
    let q = random_q(&g, 1, 1.0);
    let m = monodromy(&q, 1.5).unwrap();
    assert!((m.determinant() - 1.0).abs() < 1e-10);
    assert!(m.determinant_defect() < 1e-10);
}

#[test]
fn free_floquet_pair() {
    let g = grid(1.0, 32);
    let kappa = 2.0;
    let pair = floquet_pair(&Field::zeros(&g), kappa).unwrap();
    let plus = pair.psi_plus().unwrap();
    let minus = pair.psi_minus().unwrap();
    let norm = 1.0 / (2.0 * kappa).sqrt();
    // Symmetric normalization pins psi_+ = psi_- at x = 1/2.
    for j in 0..32 {
        let x = g.node(j) - 0.5;
        assert!((plus.samples()[j] - norm * (-kappa * x).exp()).abs() < 1e-11);
        assert!((minus.samples()[j] - norm * (kappa * x).exp()).abs() < 1e-11);
    }
    assert!((pair.log_multiplier + kappa).abs() < 1e-12);
    assert!(pair.wronskian_defect < 1e-11);
    let gd = diagonal_green(&Field::zeros(&g), kappa).unwrap();
    assert!(gd.g.samples().iter().all(|v| (v - 0.25).abs() < 1e-12));
}

#[test]
fn constant_potential_green() {
    let g = grid(1.0, 16);
    let gd = diagonal_green(&Field::constant(&g, 5.0), 3.0).unwrap();
    let want = 1.0 / (2.0 * 14f64.sqrt());
    assert!(gd.g.samples().iter().all(|v| (v - want).abs() < 1e-13));
}

#[test]
fn spectral_band_is_reported() {
    // q = -c with c > kappa^2 makes every solution oscillate: |tr M| <= 2.
    let g = grid(1.0, 16);
    let err = diagonal_green(&Field::constant(&g, -20.0), 1.0).unwrap_err();
    assert!(err.is_spectral_band(), "{err:?}");
}

#[test]
fn random_potential_floquet_diagnostics() {
    let g = grid(2.0, 64);
    let q = random_q(&g, 7, 2.0);
    for kappa in [3.0, 12.0, 40.0] {
        let pair = floquet_pair(&q, kappa).unwrap();
        assert!(pair.wronskian_defect < 1e-8, "kappa={kappa}: {}", pair.wronskian_defect);
        assert!(pair.bloch_defect < 1e-8, "kappa={kappa}: {}", pair.bloch_defect);
        assert!(pair.log_multiplier < 0.0);
        let gd = diagonal_green(&q, kappa).unwrap();
        assert!(gd.g.min() > 0.0);
        assert!(product_identity_residual(&q, &gd).unwrap() < 1e-8);
        assert!(green_ode_residual(&q, &gd).unwrap() < 1e-7);
    }
}

#[test]
fn large_kappa_product_does_not_overflow() {
    // kappa * period = 2000: psi_+- individually leave the f64 range.
    let g = grid(2.0, 64);
    let q = random_q(&g, 3, 1.0);
    let pair = floquet_pair(&q, 1000.0).unwrap();
    assert!(pair.psi_plus().is_err());
    let gd = diagonal_green(&q, 1000.0).unwrap();
    assert!((gd.g.mean() - 5e-4).abs() < 1e-8);
}

#[test]
fn nullspace_agrees_with_floquet() {
    let g = grid(2.0, 64);
    for seed in 0..3 {
        let q = random_q(&g, seed, 1.5);
        let kappa = 8.0;
        let a = diagonal_green(&q, kappa).unwrap();
        let b = diagonal_green_nullspace(&q, kappa).unwrap();
        let rel = a.g.sub(&b.g).unwrap().sup_norm() / a.g.sup_norm();
        assert!(rel < 1e-7, "seed {seed}: {rel}");
        assert_eq!(b.method, GreenMethod::Nullspace);
    }
}

#[test]
fn nullspace_free_case() {
    let g = grid(1.0, 32);
    let gd = diagonal_green_nullspace(&Field::zeros(&g), 3.0).unwrap();
    assert!(gd.g.samples().iter().all(|v| (v - 1.0 / 6.0).abs() < 1e-12));
}

#[test]
fn recovery_round_trip() {
    let g = grid(2.0, 64);
    let gd = GreenDiag {
        g: Field::constant(&g, 0.1),
        kappa: 5.0,
        method: GreenMethod::Floquet,
    };
    assert!(recover_potential(&gd).unwrap().sup_norm() < 1e-13);
    for seed in 10..13 {
        let q = random_q(&g, seed, 1.0);
        let gd = diagonal_green(&q, 6.0).unwrap();
        let back = recover_potential(&gd).unwrap();
        let rel = back.sub(&q).unwrap().sup_norm() / q.sup_norm();
        assert!(rel < 1e-6, "seed {seed}: {rel}");
    }
    let bad = GreenDiag {
        g: Field::constant(&g, -0.1),
        kappa: 5.0,
        method: GreenMethod::Floquet,
    };
    assert!(matches!(recover_potential(&bad), Err(Error::Domain(_))));
}

#[test]
fn antiderivative_identity() {
    let g = grid(2.0, 64);
    let zero = diagonal_green(&Field::zeros(&g), 4.0).unwrap();
    assert!(antiderivative_f(&zero).unwrap().sup_norm() < 1e-14);
    let q = random_q(&g, 21, 1.0);
    let gd = diagonal_green(&q, 6.0).unwrap();
    let f = antiderivative_f(&gd).unwrap();
    let qg = q.mul(&gd.g.derivative(1)).unwrap();
    let err = f.derivative(1).sub(&qg).unwrap().sup_norm();
    assert!(err <= 1e-7 * qg.sup_norm(), "{err}");
    assert!(qg.integral().abs() <= 1e-10 * qg.sup_norm());
}

#[test]
fn commutativity_relation() {
    let g = grid(2.0, 64);
    assert!(commutativity_integral(&Field::zeros(&g), 5.0, 9.0).unwrap().abs() < 1e-15);
    let q = random_q(&g, 4, 1.0);
    let gk = diagonal_green(&q, 5.0).unwrap();
    let gv = diagonal_green(&q, 9.0).unwrap();
    let scale = gv.g.l2_norm() * gk.g.derivative(1).l2_norm();
    assert!(commutativity_integral(&q, 5.0, 9.0).unwrap().abs() <= 1e-8 * scale);
    assert!(commutativity_integral(&q, 5.0, 5.0).unwrap().abs() <= 1e-12 * scale);
}

#[test]
fn alpha_vanishes_at_zero() {
    let g = grid(1.0, 32);
    assert!(alpha(&Field::zeros(&g), 3.0).unwrap().value.abs() < 1e-12);
}

#[test]
fn alpha_quadratic_coefficient() {
    // alpha(eps f) = eps^2/(2 kappa) ||f||^2_{H^{-1}_kappa} + O(eps^4) after symmetrizing in eps.
    let g = grid(1.0, 32);
    let kappa = 3.0;
    let f = Field::from_fn(&g, |x| (2.0 * PI * x).cos()).unwrap();
    let norm2 = hs_kappa_norm(&f, SobolevIndex::new(-1.0, kappa).unwrap()).unwrap().powi(2);
    assert!((norm2 - 0.5 / (4.0 * PI * PI + 4.0 * kappa * kappa)).abs() < 1e-16);
    let mut errs = Vec::new();
    for eps in [0.4, 0.2, 1e-2] {
        let plus = alpha(&f.scale(eps), kappa).unwrap().value;
        let minus = alpha(&f.scale(-eps), kappa).unwrap().value;
        let coeff = 0.5 * (plus + minus) / (eps * eps);
        let want = norm2 / (2.0 * kappa);
        errs.push(((coeff - want) / want).abs());
    }
    assert!(errs[2] < 1e-3, "{errs:?}");
    // The symmetric average removes the cubic term: the error falls like eps^2.
    let ratio = errs[0] / errs[1];
    assert!((3.5..4.5).contains(&ratio), "{errs:?}");
}

#[test]
fn alpha_two_sided_bound() {
    let g = grid(2.0, 64);
    for seed in 0..4 {
        let q = random_q(&g, 30 + seed, 0.5);
        for kappa in [4.0, 8.0] {
            let a = alpha(&q, kappa).unwrap().value;
            let n2 = hs_kappa_norm(&q, SobolevIndex::new(-1.0, kappa).unwrap()).unwrap().powi(2);
            assert!(0.25 * n2 / kappa <= a && a <= n2 / kappa, "seed {seed} kappa {kappa}");
        }
    }
}

#[test]
fn large_kappa_limit() {
    // -4 kappa^3 (g - 1/(2 kappa)) -> q.
    let g = grid(2.0, 64);
    let q = random_q(&g, 50, 1.0);
    let mut prev = f64::INFINITY;
    for kappa in [8.0, 16.0, 32.0] {
        let gd = diagonal_green(&q, kappa).unwrap();
        let approx = gd.g.map(|v| -4.0 * kappa.powi(3) * (v - 0.5 / kappa)).unwrap();
        let d = approx.sub(&q).unwrap().sup_norm();
        assert!(d < prev, "kappa={kappa}: {d} vs {prev}");
        prev = d;
    }
}

#[test]
fn translation_covariance_on_grid_shifts() {
    let g = grid(2.0, 64);
    let q = random_q(&g, 8, 1.0);
    let gd = diagonal_green(&q, 6.0).unwrap();
    for j in [1isize, 5, 17] {
        let shifted = diagonal_green(&q.rotated(j), 6.0).unwrap();
        let want = gd.g.rotated(j);
        let err = shifted.g.sub(&want).unwrap().sup_norm() / want.sup_norm();
        assert!(err < 1e-11, "shift {j}: {err}");
    }
}

#[test]
fn bloch_property_for_random_potential() {
    // psi_+(x + period) / psi_+(x) = rho, read off the reflected integration at every node.
    let g = grid(2.0, 32);
    let q = random_q(&g, 9, 1.0);
    let pair = floquet_pair(&q, 10.0).unwrap();
    assert!(pair.bloch_defect < 1e-8);
    let m = pair.monodromy.clone();
    let want = -(m.log_abs_trace());
    assert!((pair.log_multiplier - want).abs() < 1e-8);
}
