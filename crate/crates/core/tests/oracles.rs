//! Cross-checks of the public API against independent computations written here.

use num_complex::Complex64;

use kdv_core::elliptic::{solve_b, Lattice};
use kdv_core::schrodinger::{diagonal_green, monodromy};
use kdv_core::spectral::{hs_kappa_norm, SobolevIndex};
use kdv_core::{Field, PeriodicGrid};

/// `sum over the box |m|, |n| <= r` of `1/(z - w)^2 - 1/(u - w)^2`, `w = 2 m omega1 + 2 n omega3`,
/// including `w = 0`. Equals `wp(z) - wp(u)` up to an `O(r^-2)` tail.
fn wp_difference_box(lat: &Lattice, z: f64, u: f64, r: i64) -> f64 {
    let mut s = 0.0;
    for m in -r..=r {
        for n in -r..=r {
            let w = Complex64::new(2.0 * m as f64 * lat.omega1(), 2.0 * n as f64 * lat.omega3_im());
            s += ((z - w).powi(-2) - (u - w).powi(-2)).re;
        }
    }
    s
}

#[test]
fn branch_point_against_lattice_sum() {
    let lat = Lattice::new(1.0, 1.0).unwrap();
    let kappa = 10.0;
    let b = solve_b(kappa, &lat).unwrap().b;
    // Richardson step on the r^-2 tail.
    let (coarse, fine) = (
        wp_difference_box(&lat, b, lat.omega1(), 100),
        wp_difference_box(&lat, b, lat.omega1(), 200),
    );
    let sum = (4.0 * fine - coarse) / 3.0;
    assert!((sum - kappa * kappa).abs() < 1e-8 * kappa * kappa, "{sum}");
}

/// Classical RK4 for `psi'' = (q(x) + kappa^2) psi` with an analytic `q`.
fn rk4_monodromy(q: impl Fn(f64) -> f64, kappa: f64, period: f64, steps: usize) -> [[f64; 2]; 2] {
    let h = period / steps as f64;
    let f = |x: f64, y: [f64; 2]| [y[1], (q(x) + kappa * kappa) * y[0]];
    let mut cols = [[1.0, 0.0], [0.0, 1.0]];
    for y in cols.iter_mut() {
        for i in 0..steps {
            let x = i as f64 * h;
            let k1 = f(x, *y);
            let k2 = f(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = f(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for c in 0..2 {
                y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
        }
    }
    [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]
}

#[test]
fn monodromy_against_rk4() {
    let period = 2.0;
    let w = std::f64::consts::PI;
    let q = |x: f64| 1.5 * (w * x).cos() - 0.7 * (2.0 * w * x + 0.3).sin();
    let grid = PeriodicGrid::new(period, 64).unwrap();
    let field = Field::from_fn(&grid, q).unwrap();
    for kappa in [2.0, 3.5] {
        let want = rk4_monodromy(q, kappa, period, 40_000);
        let got = monodromy(&field, kappa).unwrap().matrix();
        for i in 0..2 {
            for j in 0..2 {
                let scale = want[i][j].abs().max(1.0);
                assert!((got[i][j] - want[i][j]).abs() < 1e-9 * scale, "{i}{j}: {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn green_is_the_line_not_the_circle() {
    // On the circle the diagonal would be coth(kappa L / 2) / (2 kappa) = 2.16 here.
    let grid = PeriodicGrid::new(2.0, 32).unwrap();
    let g = diagonal_green(&Field::zeros(&grid), 0.5).unwrap().g;
    assert!(g.samples().iter().all(|v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn green_for_constant_potential() {
    let grid = PeriodicGrid::new(2.0, 32).unwrap();
    for (c, kappa) in [(-3.0, 2.0), (5.0, 1.0), (0.25, 7.0)] {
        let g = diagonal_green(&Field::constant(&grid, c), kappa).unwrap().g;
        let want = 0.5 / (kappa * kappa + c).sqrt();
        assert!(g.samples().iter().all(|v| (v - want).abs() < 1e-12 * want));
    }
}

#[test]
fn green_linear_response() {
    // g(eps f) = 1/(2 kappa) - eps f_hat(xi) / (kappa (xi^2 + 4 kappa^2)) e^{i xi x} + O(eps^2).
    let grid = PeriodicGrid::new(2.0, 64).unwrap();
    let kappa = 3.0;
    let eps = 1e-4;
    for m in [1.0, 3.0] {
        let xi = std::f64::consts::PI * m;
        let f = Field::from_fn(&grid, |x| (xi * x).cos()).unwrap();
        let g = diagonal_green(&f.scale(eps), kappa).unwrap().g;
        let lin = -1.0 / (kappa * (xi * xi + 4.0 * kappa * kappa));
        for (j, x) in grid.nodes().into_iter().enumerate() {
            let got = (g.samples()[j] - 0.5 / kappa) / eps;
            assert!((got - lin * (xi * x).cos()).abs() < 1e-3 * lin.abs(), "mode {m} node {j}");
        }
    }
}

#[test]
fn sobolev_norm_of_a_single_mode() {
    let grid = PeriodicGrid::new(1.0, 16).unwrap();
    let tau = std::f64::consts::TAU;
    let f = Field::from_fn(&grid, |x| (tau * x).cos()).unwrap();
    let got = hs_kappa_norm(&f, SobolevIndex::new(-1.0, 1.0).unwrap()).unwrap();
    let want = (2.0 * 0.25 / (tau * tau + 4.0)).sqrt();
    assert!((got - want).abs() < 1e-15);
}
