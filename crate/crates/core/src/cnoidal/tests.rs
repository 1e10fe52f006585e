use super::*;
use crate::schrodinger::{diagonal_green, floquet_pair};

fn lattices() -> Vec<Lattice> {
    vec![Lattice::new(1.0, 1.0).unwrap(), Lattice::new(1.0, 0.8).unwrap()]
}

fn wave(lat: &Lattice) -> CnoidalWeierstrass {
    CnoidalWeierstrass::new(lat.clone())
}

#[test]
fn weierstrass_profile_is_periodic_and_traveling() {
    for lat in lattices() {
        let w = wave(&lat);
        let p = w.period();
        for x in [0.0, 0.3, 1.7] {
            let v = w.profile(0.0, x).unwrap();
            assert!((w.profile(0.0, x + p).unwrap() - v).abs() < 1e-10);
            let t = 0.013;
            let moved = w.profile(t, x).unwrap();
            assert!((moved - w.profile(0.0, x + 6.0 * lat.e1() * t).unwrap()).abs() < 1e-13);
        }
    }
}

#[test]
fn weierstrass_profile_trough_and_crest() {
    for lat in lattices() {
        let w = wave(&lat);
        let trough = w.profile(0.0, 0.0).unwrap();
        let crest = w.profile(0.0, lat.omega1()).unwrap();
        assert!((trough - (2.0 * lat.e3() + lat.e1())).abs() < 1e-10);
        assert!((crest - (2.0 * lat.e2() + lat.e1())).abs() < 1e-10);
    }
}

#[test]
fn mean_matches_quadrature_at_two_resolutions() {
    for lat in lattices() {
        let w = wave(&lat);
        let coarse = w.field(&w.grid(64).unwrap(), 0.0).unwrap().mean();
        let fine = w.field(&w.grid(128).unwrap(), 0.0).unwrap().mean();
        assert!((coarse - fine).abs() < 1e-12);
        assert!((fine - w.mean()).abs() < 1e-11, "{fine} vs {}", w.mean());
    }
}

#[test]
fn field_rejects_mismatched_grid() {
    let w = wave(&Lattice::new(1.0, 1.0).unwrap());
    let grid = PeriodicGrid::new(1.0, 32).unwrap();
    assert!(matches!(w.field(&grid, 0.0), Err(Error::InvalidInput(_))));
}

/// `V_t + V''' - 6 V V'` with `V_t` supplied from the traveling argument.
fn kdv_residual(v: &Field, v_t: &Field) -> f64 {
    let dv = v.derivative(1);
    let res = v_t.add(&v.derivative(3)).unwrap().sub(&v.mul(&dv).unwrap().scale(6.0)).unwrap();
    res.sup_norm()
}

#[test]
fn weierstrass_profile_solves_kdv() {
    for lat in lattices() {
        let w = wave(&lat);
        let grid = w.grid(256).unwrap();
        let v = w.field(&grid, 0.0).unwrap();
        let v_t = v.derivative(1).scale(w.kdv_speed());
        assert!(kdv_residual(&v, &v_t) < 1e-6);
    }
}

#[test]
fn jacobi_profile_solves_kdv() {
    // V(x - c t) gives V_t = -c V'.
    for (k, h) in [(0.5, 2.0), (0.9, 1.0)] {
        let j = CnoidalJacobi::new(k, h).unwrap();
        let grid = PeriodicGrid::new(j.period().unwrap(), 256).unwrap();
        let v = Field::try_from_fn(&grid, |x| j.profile(0.0, x)).unwrap();
        let v_t = v.derivative(1).scale(-j.speed);
        assert!(kdv_residual(&v, &v_t) < 1e-6 * h.max(1.0).powi(2));
        assert!(v.mean().abs() < 1e-12);
        assert!((v.min() - (j.eta - h)).abs() < 1e-12);
        assert!(v.max() <= j.eta + 1e-12);
        let t = 0.02;
        let x = 0.37;
        let moved = j.profile(t, x).unwrap();
        assert!((moved - j.profile(0.0, x - j.speed * t).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn jacobi_rejects_bad_parameters() {
    assert!(matches!(CnoidalJacobi::new(1.0, 1.0), Err(Error::Parameter(_))));
    assert!(matches!(CnoidalJacobi::new(0.0, 1.0), Err(Error::Parameter(_))));
    assert!(matches!(CnoidalJacobi::new(0.5, -1.0), Err(Error::Parameter(_))));
    assert!(profile_jacobi(1.2, 1.0, 0.0, 0.0).is_err());
}

#[test]
fn jacobi_small_modulus_is_a_cosine() {
    assert!((jacobi_cn(0.7, 0.0).unwrap() - 0.7f64.cos()).abs() < 1e-15);
    let j = CnoidalJacobi::new(1e-3, 0.5).unwrap();
    let s = j.wavenumber();
    // Crest-to-trough distance h, profile eta - h cos^2(s x) + O(k^2).
    for x in [0.0, 0.2 / s, 1.1 / s] {
        let want = j.eta - j.h * (s * x).cos().powi(2);
        assert!((j.profile(0.0, x).unwrap() - want).abs() < 1e-6);
    }
    assert!((j.eta - 0.25).abs() < 1e-6);
}

#[test]
fn jacobi_and_weierstrass_agree_after_matching() {
    for lat in lattices() {
        let w = wave(&lat);
        let j = w.matched_jacobi().unwrap();
        assert!((j.period().unwrap() - w.period()).abs() < 1e-12);
        // The Jacobi form has zero mean; the Weierstrass form has mean w.mean().
        let mut worst = 0.0f64;
        for i in 0..50 {
            let x = 0.043 * i as f64;
            let a = w.profile(0.0, x).unwrap() - w.mean();
            let b = j.profile(0.0, x).unwrap();
            worst = worst.max((a - b).abs());
        }
        assert!(worst < 1e-8, "{worst}");
        // Galilean shift by the mean: the speeds differ by 6 * mean.
        assert!((-j.speed - (w.kdv_speed() - 6.0 * w.mean())).abs() < 1e-8);
    }
}

#[test]
fn hk_green_is_affine_in_profile() {
    for lat in lattices() {
        let w = wave(&lat);
        let grid = w.grid(128).unwrap();
        let v = w.field(&grid, 0.0).unwrap();
        for kappa in [6.0, 12.0] {
            let hk = hk_traveling_wave(&lat, kappa).unwrap();
            let closed = hk.green(&grid).unwrap();
            let numeric = diagonal_green(&v, kappa).unwrap().g;
            let err = closed.sub(&numeric).unwrap().sup_norm() / closed.sup_norm();
            assert!(err < 1e-7, "kappa {kappa}: {err}");

            // g - c1 is exactly proportional to V: correlation one.
            let a = numeric.map(|g| g - hk.c1).unwrap();
            let corr = a.inner(&v).unwrap() / (a.l2_norm() * v.l2_norm());
            assert!((corr.abs() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn hk_speed_approaches_kdv_speed() {
    let lat = Lattice::new(1.0, 1.0).unwrap();
    let table = asymptotics_table(&lat, &[8.0, 16.0, 32.0]).unwrap();
    assert_eq!(table.decreasing(), [true; 4]);
    for row in &table.rows {
        let hk = hk_traveling_wave(&lat, row.kappa).unwrap();
        assert_eq!(hk.nu, row.nu);
    }
    assert!(asymptotics_table(&lat, &[8.0, 4.0]).is_err());
}

#[test]
fn branch_point_remainder_is_third_order() {
    // wp(b) = 1/b^2 + O(b^2) gives b = 1/kappa - e1/(2 kappa^3) + O(kappa^-5).
    let lat = Lattice::new(1.0, 0.8).unwrap();
    let table = asymptotics_table(&lat, &[16.0, 32.0, 64.0]).unwrap();
    let mut prev = f64::INFINITY;
    for row in &table.rows {
        let lead = -lat.e1() / (2.0 * row.kappa.powi(3));
        let rel = ((row.b_err - lead) / lead).abs();
        assert!(rel < prev / 3.0, "kappa {}: {rel}", row.kappa);
        prev = rel;
    }
    for e in table.observed_exponents() {
        assert!((e[3] - 3.0).abs() < 0.05, "{e:?}");
    }
}

#[test]
fn closed_form_wronskian_is_one() {
    for lat in lattices() {
        for kappa in [3.0, 10.0] {
            let f = FloquetClosedForm::new(&lat, kappa).unwrap();
            for x in [0.0, 0.4, 1.3] {
                let (p, m) = f.psi_pair(x).unwrap();
                let (dp, dm) = f.dlog_psi_pair(x).unwrap();
                assert!((p * m * (dm - dp) - 1.0).abs() < 1e-10);

                // Fourth-order central differences.
                let h = 1e-3;
                let d = |s: usize| {
                    let at = |y: f64| {
                        let v = f.psi_pair(y).unwrap();
                        if s == 0 { v.0 } else { v.1 }
                    };
                    (8.0 * (at(x + h) - at(x - h)) - (at(x + 2.0 * h) - at(x - 2.0 * h))) / (12.0 * h)
                };
                let w = p * d(1) - d(0) * m;
                assert!((w - 1.0).abs() < 1e-8, "kappa {kappa}, x {x}: {w}");
            }
        }
    }
}

#[test]
fn closed_form_solves_eigenvalue_equation() {
    for lat in lattices() {
        let w = wave(&lat);
        let grid = w.grid(256).unwrap();
        let v = w.field(&grid, 0.0).unwrap();
        let kappa = 4.0;
        let f = FloquetClosedForm::new(&lat, kappa).unwrap();
        let rho = f.multiplier();
        // psi_+ e^{-mu x} with rho = e^{mu period} is periodic, so spectral derivatives apply.
        let mu = rho.ln() / w.period();
        let periodic = Field::try_from_fn(&grid, |x| Ok(f.psi_pair(x)?.0 * (-mu * x).exp())).unwrap();
        let d1 = periodic.derivative(1);
        let d2 = periodic.derivative(2);
        let psi = periodic.zip_with(&Field::from_fn(&grid, |x| (mu * x).exp()).unwrap(), |a, e| a * e).unwrap();
        let psi_dd = Field::from_fn(&grid, |x| (mu * x).exp())
            .unwrap()
            .mul(&d2.linear_combination(1.0, &d1, 2.0 * mu).unwrap().linear_combination(1.0, &periodic, mu * mu).unwrap())
            .unwrap();
        let res = psi
            .mul(&v.map(|v| v + kappa * kappa).unwrap())
            .unwrap()
            .sub(&psi_dd)
            .unwrap();
        assert!(res.sup_norm() <= 1e-6 * kappa * kappa * psi.sup_norm());
    }
}

#[test]
fn closed_form_product_is_green() {
    for lat in lattices() {
        let kappa = 5.0;
        let f = FloquetClosedForm::new(&lat, kappa).unwrap();
        let wp_b = lat.wp_real(f.b).unwrap();
        let dwp_b = lat.wp_prime(Complex64::new(f.b, 0.0)).unwrap().re;
        for x in [0.0, 0.25, 0.9, 1.6] {
            let wp_x = lat.wp(Complex64::new(x, 0.0) + lat.omega3()).unwrap().re;
            let want = (wp_b - wp_x) / -dwp_b;
            assert!((f.product(x).unwrap() - want).abs() < 1e-12 * want);
        }
        let w = wave(&lat);
        let grid = w.grid(64).unwrap();
        let pair = floquet_pair(&w.field(&grid, 0.0).unwrap(), kappa).unwrap();
        let g = pair.product().unwrap();
        for (j, x) in grid.nodes().into_iter().enumerate() {
            assert!((g.samples()[j] - f.product(x).unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn closed_form_multiplier_carries_eta1_factor() {
    for lat in lattices() {
        for kappa in [2.0, 6.0] {
            let f = FloquetClosedForm::new(&lat, kappa).unwrap();
            let p = lat.real_period();
            let x = 0.3;
            let (a, b) = f.log_psi_pair(x).unwrap();
            let (a2, b2) = f.log_psi_pair(x + p).unwrap();
            let ln_rho = f.multiplier().ln();
            assert!((a2 - a - ln_rho).abs() < 1e-10);
            assert!((b2 - b + ln_rho).abs() < 1e-10);

            // Independent check: the monodromy of the sampled potential.
            let w = wave(&lat);
            let grid = w.grid(64).unwrap();
            let pair = floquet_pair(&w.field(&grid, 0.0).unwrap(), kappa).unwrap();
            assert!((pair.log_multiplier - ln_rho).abs() < 1e-9);

            // The stated form omits e^{2 eta1 b}, which is not one.
            let gap = f.stated_multiplier().ln() - ln_rho;
            assert!((gap + 2.0 * lat.eta1() * f.b).abs() < 1e-12);
            assert!(gap.abs() > 1e-3);
        }
    }
}

#[test]
fn closed_form_positivity() {
    let lat = Lattice::new(1.0, 0.8).unwrap();
    let (p, m) = floquet_closed_form(&lat, 7.0, 0.5).unwrap();
    assert!(p > 0.0 && m > 0.0);
}
