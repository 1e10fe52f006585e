//! Weierstrass functions on rectangular lattices and Jacobi `cn`.

mod jacobi;
mod weierstrass;

pub use jacobi::{complete_integrals, jacobi_cn};
pub use weierstrass::{lattice_invariants, Lattice, POLE_TOL};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Invariants this module guarantees; the verify suite runs one check per name.
pub const INVARIANTS: &[&str] = &[
    "wp-ode",
    "wp-periodicity",
    "wp-lattice-sum",
    "g3-square",
    "branch-point",
];

/// Solution `b` in `(0, omega1)` of `wp(b) - e1 = kappa^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchPoint {
    pub kappa: f64,
    pub b: f64,
}

/// `wp` is real and strictly decreasing on `(0, omega1)` from `+inf` to `e1`, so every
/// `kappa > 0` has exactly one branch point; it is bracketed, bisected, then Newton-polished.
pub fn solve_b(kappa: f64, lat: &Lattice) -> Result<BranchPoint> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::Parameter(format!("kappa must be positive, got {kappa}")));
    }
    let target = kappa * kappa + lat.e1();
    let f = |b: f64| -> Result<f64> { Ok(lat.wp_real(b)? - target) };

    let mut hi = lat.omega1();
    let mut lo = (0.5 / kappa).min(0.5 * hi);
    while f(lo)? <= 0.0 {
        lo *= 0.5;
        if lo < 10.0 * POLE_TOL {
            return Err(Error::NoSolution(format!(
                "kappa = {kappa} needs b below the pole-proximity limit"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut b = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = lat.wp_prime(Complex64::new(b, 0.0))?.re;
        if d == 0.0 {
            break;
        }
        let next = b - f(b)? / d;
        if !(next > 0.0 && next < lat.omega1()) {
            break;
        }
        b = next;
    }
    Ok(BranchPoint { kappa, b })
}
