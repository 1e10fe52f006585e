//! Exact Fourier-side identities for the linear and quadratic terms of the
//! Green's function expansion.

use num_complex::Complex64;

use super::{apply_real_symbol, Field};
use crate::error::{Error, Result};

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::Parameter(format!("kappa must be positive, got {kappa}")));
    }
    Ok(())
}

/// Sup-norm difference between `16 kappa^4 R0(2 kappa) f` and
/// `[4 kappa^2 + d^2 + R0(2 kappa) d^4] f`.
pub fn verify_linear_identity(f: &Field, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let k2 = kappa * kappa;
    // Both sides are formed per mode and differenced before synthesis.
    let diff = apply_real_symbol(f, |xi| {
        let x2 = xi * xi;
        let lhs = 16.0 * k2 * k2 / (x2 + 4.0 * k2);
        let rhs = 4.0 * k2 - x2 + x2 * x2 / (x2 + 4.0 * k2);
        lhs - rhs
    });
    Ok(diff.sup_norm())
}

/// Fourier kernel of the quadratic term: `8 kappa^4 [xi^2 + a^2 + b^2 + 24 kappa^2] / (C A B)`
/// with `a = xi - eta` the frequency of `f`, `b = eta` that of `h`.
pub fn quadratic_identity_kernel(xi: f64, eta: f64, kappa: f64) -> f64 {
    let k2 = kappa * kappa;
    let a = xi - eta;
    let num = 8.0 * k2 * k2 * (xi * xi + a * a + eta * eta + 24.0 * k2);
    num / ((xi * xi + 4.0 * k2) * (a * a + 4.0 * k2) * (eta * eta + 4.0 * k2))
}

/// Relative spectral energy allowed above `n/3` for a field to count as band-limited.
const BAND_TOL: f64 = 1e-24;

/// Sup-norm difference between the kernel form of the quadratic term and its
/// expansion into products of resolvent images.
///
/// Both sides are formed on a grid twice as fine, where the products of
/// `n/3`-band-limited inputs are exact.
pub fn verify_quadratic_identity(f: &Field, h: &Field, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if f.grid() != h.grid() {
        return Err(Error::InvalidInput("f and h live on different grids".into()));
    }
    let grid = f.grid();
    let cut = grid.dealias_cutoff();
    for (name, field) in [("f", f), ("h", h)] {
        let tail = field.tail_fraction(cut);
        if tail > BAND_TOL {
            return Err(Error::Precondition(format!(
                "{name} carries relative energy {tail:e} above mode {cut}"
            )));
        }
    }

    let fine = grid.refined(2)?;
    let fp = f.resampled(&fine)?;
    let hp = h.resampled(&fine)?;
    let m = fine.n();
    let base = 2.0 * std::f64::consts::PI / grid.period();
    let cut = cut as isize;

    // Left side: direct discrete convolution over the active modes.
    let mut lhs = vec![Complex64::new(0.0, 0.0); m];
    let coeff = |field: &Field, k: isize| field.spectrum()[k.rem_euclid(grid.n() as isize) as usize];
    for k in -2 * cut..=2 * cut {
        let xi = base * k as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in (k - cut).max(-cut)..=(k + cut).min(cut) {
            let eta = base * j as f64;
            acc += quadratic_identity_kernel(xi, eta, kappa) * coeff(f, k - j) * coeff(h, j);
        }
        lhs[k.rem_euclid(m as isize) as usize] = acc;
    }
    let lhs = Field::from_spectrum(&fine, lhs)?;

    // Right side: products of resolvent images, then multipliers on the products.
    let k2 = kappa * kappa;
    let r = |g: &Field| apply_real_symbol(g, |xi| 1.0 / (xi * xi + 4.0 * k2));
    let t1 = fp.mul(&hp)?.scale(3.0);
    let t2 = r(&fp.derivative(2)).mul(&r(&hp.derivative(2)))?.scale(-3.0);
    let p3 = r(&fp.derivative(1)).mul(&r(&hp.derivative(1)))?;
    let t3 = apply_real_symbol(&p3, |xi| 4.0 * k2 * (-5.0 - xi * xi / (xi * xi + 4.0 * k2)));
    let p4 = r(&fp).mul(&r(&hp))?;
    let t4 = apply_real_symbol(&p4, |xi| {
        let x2 = xi * xi;
        4.0 * k2 * (-5.0 * x2 + 2.0 * x2 * x2 / (x2 + 4.0 * k2))
    });
    let rhs = t1.add(&t2)?.add(&t3)?.add(&t4)?;
    Ok(lhs.sub(&rhs)?.sup_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PeriodicGrid;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn band_limited(grid: &PeriodicGrid, coeffs: &[(f64, f64)]) -> Field {
        let mut spec = vec![Complex64::new(0.0, 0.0); grid.n()];
        for (k, &(re, im)) in coeffs.iter().enumerate().take(grid.dealias_cutoff()) {
            let k = k + 1;
            let decay = (-(k as f64) / 8.0).exp();
            spec[k] = Complex64::new(decay * re, decay * im);
            spec[grid.n() - k] = spec[k].conj();
        }
        Field::from_spectrum(grid, spec).unwrap()
    }

    #[test]
    fn zero_fields_give_zero_residuals() {
        let g = PeriodicGrid::new(1.0, 32).unwrap();
        let z = Field::zeros(&g);
        assert_eq!(verify_linear_identity(&z, 3.0).unwrap(), 0.0);
        assert_eq!(verify_quadratic_identity(&z, &z, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_identity_single_mode() {
        let g = PeriodicGrid::new(1.0, 32).unwrap();
        let f = Field::from_fn(&g, |x| (2.0 * PI * x).cos()).unwrap();
        assert!(verify_linear_identity(&f, 3.0).unwrap() <= 1e-12);
    }

    #[test]
    fn quadratic_identity_single_mode() {
        let g = PeriodicGrid::new(1.0, 32).unwrap();
        let f = Field::from_fn(&g, |x| (2.0 * PI * x).cos()).unwrap();
        assert!(verify_quadratic_identity(&f, &f, 4.0).unwrap() <= 1e-10);
    }

    #[test]
    fn quadratic_kernel_brute_force() {
        // f = h = cos(2 pi x): active input modes +-1, output modes -2..2.
        let kappa = 4.0;
        let w = 2.0 * PI;
        let k = |a: f64, b: f64| quadratic_identity_kernel(a, b, kappa);
        let c2 = 0.25 * k(2.0 * w, w);
        let c0 = 0.25 * (k(0.0, w) + k(0.0, -w));
        let g = PeriodicGrid::new(1.0, 32).unwrap();
        let f = Field::from_fn(&g, |x| (2.0 * PI * x).cos()).unwrap();
        // Brute-force left side in physical space against the product expansion.
        let brute = Field::from_fn(&g, |x| c0 + 2.0 * c2 * (2.0 * w * x).cos()).unwrap();
        let k2 = kappa * kappa;
        let r = |xi: f64| 1.0 / (xi * xi + 4.0 * k2);
        let ff = |x: f64| (w * x).cos();
        // Right side per mode, using cos^2 = (1 + cos 2wx)/2 and sin^2 = (1 - cos 2wx)/2.
        let rhs = Field::from_fn(&g, |x| {
            let rf2 = -w * w * r(w) * ff(x);
            let t1 = 3.0 * ff(x) * ff(x);
            let t2 = -3.0 * rf2 * rf2;
            // rf1^2 = r^2 w^2 (1 - cos 2wx)/2; apply (-5 + R0 d^2) per mode.
            let a = r(w) * r(w) * w * w / 2.0;
            let t3 = 4.0 * k2 * (a * -5.0 - a * (-5.0 - 4.0 * w * w * r(2.0 * w)) * (2.0 * w * x).cos());
            // rf^2 = r^2 (1 + cos 2wx)/2; apply (5 d^2 + 2 R0 d^4) per mode.
            let b = r(w) * r(w) / 2.0;
            let s = -5.0 * 4.0 * w * w + 2.0 * r(2.0 * w) * (2.0 * w).powi(4);
            let t4 = 4.0 * k2 * b * s * (2.0 * w * x).cos();
            t1 + t2 + t3 + t4
        })
        .unwrap();
        assert!(brute.sub(&rhs).unwrap().sup_norm() < 1e-12);
        assert!(verify_quadratic_identity(&f, &f, kappa).unwrap() < 1e-12);
    }

    #[test]
    fn aliasing_guard() {
        let g = PeriodicGrid::new(1.0, 32).unwrap();
        let f = Field::from_fn(&g, |x| (2.0 * PI * 14.0 * x).cos()).unwrap();
        let err = verify_quadratic_identity(&f, &f, 2.0).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn linear_identity_random(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40), kappa in 1.0f64..32.0) {
            let g = PeriodicGrid::new(1.0, 128).unwrap();
            let f = band_limited(&g, &coeffs);
            prop_assert!(verify_linear_identity(&f, kappa).unwrap() <= 1e-10);
        }

        #[test]
        fn quadratic_identity_symmetric(c1 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10),
                                        c2 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10),
                                        kappa in 1.0f64..10.0) {
            let g = PeriodicGrid::new(1.0, 32).unwrap();
            let f = band_limited(&g, &c1);
            let h = band_limited(&g, &c2);
            let a = verify_quadratic_identity(&f, &h, kappa).unwrap();
            let b = verify_quadratic_identity(&h, &f, kappa).unwrap();
            prop_assert!(a <= 1e-10 && b <= 1e-10);
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
