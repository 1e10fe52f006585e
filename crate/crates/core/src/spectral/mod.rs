//! Periodic grids, Fourier multipliers, `H^s_kappa` norms and free resolvents.
//!
//! Coefficients follow `f_hat(xi) = (1/n) sum_j f(x_j) e^{-i xi x_j}` with
//! `xi in (2 pi / period) Z`. Norms carry a factor of the period so that
//! `||f||_{H^0_kappa}^2` is the grid integral of `f^2` on any period.

mod field;
mod grid;
mod identities;
mod line;

pub use field::Field;
pub use grid::PeriodicGrid;
pub use identities::{quadratic_identity_kernel, verify_linear_identity, verify_quadratic_identity};
pub use line::{hilbert_schmidt_identity_line, LineFunction, LINE_HALF_WIDTH, LINE_POINTS};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Invariants this module guarantees; the verify suite runs one check per name.
pub const INVARIANTS: &[&str] = &[
    "parseval",
    "multiplier-composition",
    "linear-identity",
    "quadratic-identity",
    "hilbert-schmidt",
    "duality-bound",
    "resolvent-limit",
];

/// Exponent `s` and energy `kappa` of the weight `(xi^2 + 4 kappa^2)^s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevIndex {
    pub s: f64,
    pub kappa: f64,
}

impl SobolevIndex {
    pub fn new(s: f64, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) || !s.is_finite() {
            return Err(Error::Parameter(format!(
                "Sobolev index needs finite s and kappa > 0, got s={s}, kappa={kappa}"
            )));
        }
        Ok(Self { s, kappa })
    }

    /// The index used by every `H^{-1}` diagnostic: weight `(xi^2 + 1)^{-1}`.
    pub fn h_minus_one() -> Self {
        Self { s: -1.0, kappa: 0.5 }
    }
}

/// `(period * sum_xi (xi^2 + 4 kappa^2)^s |f_hat(xi)|^2)^(1/2)`.
pub fn hs_kappa_norm(f: &Field, idx: SobolevIndex) -> Result<f64> {
    let idx = SobolevIndex::new(idx.s, idx.kappa)?;
    if f.samples().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite samples".into()));
    }
    let four_k2 = 4.0 * idx.kappa * idx.kappa;
    let sum: f64 = f
        .grid()
        .wavenumbers()
        .iter()
        .zip(f.spectrum())
        .map(|(&xi, c)| (xi * xi + four_k2).powf(idx.s) * c.norm_sqr())
        .sum();
    Ok((f.grid().period() * sum).sqrt())
}

/// `H^{-1}` norm with weight `(xi^2 + 1)^{-1}`.
pub fn h_minus_one_norm(f: &Field) -> f64 {
    hs_kappa_norm(f, SobolevIndex::h_minus_one()).expect("fields are finite by construction")
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Applies the Fourier multiplier `m`. At the Nyquist frequency the real part of
/// `(m(xi) + m(-xi)) / 2` is used, which keeps the output real.
pub fn apply_multiplier(f: &Field, m: impl Fn(f64) -> Complex64) -> Result<Field> {
    let grid = f.grid();
    let n = grid.n();
    let mut values = Vec::with_capacity(n);
    for (k, &xi) in grid.wavenumbers().iter().enumerate() {
        let plus = m(xi);
        let minus = m(-xi);
        let defect = (minus - plus.conj()).norm();
        if !(defect <= SYMMETRY_TOL * plus.norm().max(1.0)) {
            return Err(Error::Symmetry {
                xi,
                minus: format!("{minus}"),
                conj_plus: format!("{}", plus.conj()),
            });
        }
        if grid.is_nyquist(k) {
            values.push(Complex64::new(0.5 * (plus + minus).re, 0.0));
        } else {
            values.push(plus);
        }
    }
    Ok(f.with_symbol_values(&values))
}

/// Real even multiplier `m(|xi|)`; no symmetry check needed.
pub(crate) fn apply_real_symbol(f: &Field, m: impl Fn(f64) -> f64) -> Field {
    let values: Vec<Complex64> = f
        .grid()
        .wavenumbers()
        .iter()
        .map(|&xi| Complex64::new(m(xi), 0.0))
        .collect();
    f.with_symbol_values(&values)
}

/// Free resolvent `(-d^2 + kappa^2)^{-1}`, i.e. multiplier `1 / (xi^2 + kappa^2)`.
pub fn r0_apply(f: &Field, kappa: f64) -> Result<Field> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::Parameter(format!("kappa must be positive, got {kappa}")));
    }
    let k2 = kappa * kappa;
    Ok(apply_real_symbol(f, |xi| 1.0 / (xi * xi + k2)))
}
