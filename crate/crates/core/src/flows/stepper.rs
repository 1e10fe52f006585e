//! Exponential fourth-order steppers for `u_t = m(xi) u + N(u, t)` with diagonal `m`.

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Contour points for the ETDRK4 coefficients.
const CONTOUR_POINTS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stepper {
    /// Classical RK4 in the integrating-factor variables `e^{-t m} u` (Lawson).
    Rk4MultiplierExact,
    /// Cox-Matthews exponential time differencing with contour-integral coefficients.
    EtdRk4,
}

impl Stepper {
    pub fn name(self) -> &'static str {
        match self {
            Stepper::Rk4MultiplierExact => "rk4_multiplier_exact",
            Stepper::EtdRk4 => "etd_rk4",
        }
    }
}

impl FromStr for Stepper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4_multiplier_exact" | "rk4" | "if-rk4" => Ok(Stepper::Rk4MultiplierExact),
            "etd_rk4" | "etdrk4" => Ok(Stepper::EtdRk4),
            other => Err(Error::InvalidInput(format!("unknown stepper {other:?}"))),
        }
    }
}

type Spectrum = Vec<Complex64>;

/// Precomputed per-mode factors for one step size.
pub(crate) enum Scheme {
    Lawson {
        half: Spectrum,
    },
    Etd {
        full: Spectrum,
        half: Spectrum,
        q: Spectrum,
        f1: Spectrum,
        f2: Spectrum,
        f3: Spectrum,
    },
}

/// `(e^{z/2} - 1)/z` and the three ETDRK4 weights, averaged over a circle around `z`.
fn etd_weights(z: Complex64) -> [Complex64; 4] {
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for j in 0..CONTOUR_POINTS {
        let theta = std::f64::consts::TAU * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
        let r = z + Complex64::from_polar(1.0, theta);
        let e = r.exp();
        let eh = (0.5 * r).exp();
        let r2 = r * r;
        let r3 = r2 * r;
        acc[0] += (eh - 1.0) / r;
        acc[1] += (-4.0 - r + e * (4.0 - 3.0 * r + r2)) / r3;
        acc[2] += (2.0 + r + e * (r - 2.0)) / r3;
        acc[3] += (-4.0 - 3.0 * r - r2 + e * (4.0 - r)) / r3;
    }
    acc.map(|a| a / CONTOUR_POINTS as f64)
}

impl Scheme {
    pub(crate) fn new(stepper: Stepper, symbol: &[Complex64], h: f64) -> Self {
        let half: Spectrum = symbol.iter().map(|m| (0.5 * h * m).exp()).collect();
        match stepper {
            Stepper::Rk4MultiplierExact => Scheme::Lawson { half },
            Stepper::EtdRk4 => {
                let weights: Vec<[Complex64; 4]> =
                    symbol.iter().map(|m| etd_weights(h * m)).collect();
                let pick = |i: usize| weights.iter().map(|w| h * w[i]).collect::<Spectrum>();
                Scheme::Etd {
                    full: symbol.iter().map(|m| (h * m).exp()).collect(),
                    half,
                    q: pick(0),
                    f1: pick(1),
                    f2: pick(2),
                    f3: pick(3),
                }
            }
        }
    }

    /// Advances `u` by `h` from time `t`; `n(u, t)` is the nonlinear part in spectral form.
    pub(crate) fn step(
        &self,
        u: &[Complex64],
        t: f64,
        h: f64,
        mut n: impl FnMut(&[Complex64], f64) -> Result<Spectrum>,
    ) -> Result<Spectrum> {
        let len = u.len();
        let combine = |f: &dyn Fn(usize) -> Complex64| (0..len).map(f).collect::<Spectrum>();
        match self {
            Scheme::Lawson { half } => {
                let e = half;
                let k1 = n(u, t)?;
                let u2 = combine(&|i| e[i] * (u[i] + 0.5 * h * k1[i]));
                let k2 = n(&u2, t + 0.5 * h)?;
                let u3 = combine(&|i| e[i] * u[i] + 0.5 * h * k2[i]);
                let k3 = n(&u3, t + 0.5 * h)?;
                let u4 = combine(&|i| e[i] * (e[i] * u[i] + h * k3[i]));
                let k4 = n(&u4, t + h)?;
                Ok(combine(&|i| {
                    let e2 = e[i] * e[i];
                    e2 * u[i] + h / 6.0 * (e2 * k1[i] + 2.0 * e[i] * (k2[i] + k3[i]) + k4[i])
                }))
            }
            Scheme::Etd {
                full,
                half,
                q,
                f1,
                f2,
                f3,
            } => {
                let nu = n(u, t)?;
                let a = combine(&|i| half[i] * u[i] + q[i] * nu[i]);
                let na = n(&a, t + 0.5 * h)?;
                let b = combine(&|i| half[i] * u[i] + q[i] * na[i]);
                let nb = n(&b, t + 0.5 * h)?;
                let c = combine(&|i| half[i] * a[i] + q[i] * (2.0 * nb[i] - nu[i]));
                let nc = n(&c, t + h)?;
                Ok(combine(&|i| {
                    full[i] * u[i] + f1[i] * nu[i] + 2.0 * f2[i] * (na[i] + nb[i]) + f3[i] * nc[i]
                }))
            }
        }
    }
}
