use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distance below which `wp`, `wp'` and `zeta` refuse to evaluate.
pub const POLE_TOL: f64 = 1e-6;
/// Series stop once `q^{2n}` drops below this. Terms scale like `q^{2n} e^{2n |Im u|} >= q^n`
/// on the reduced cell, so the square of the target accuracy is needed.
const SERIES_TOL: f64 = 1e-36;

/// Rectangular period lattice `2 omega1 Z + 2 i omega3_im Z`.
///
/// Values come from Fourier expansions in the orientation whose nome
/// `e^{-pi * long / short}` is at most `e^{-pi}`; a wide lattice is evaluated
/// through its rotation `L = i L'`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    omega1: f64,
    omega3_im: f64,
    g2: f64,
    g3: f64,
    /// `wp` at `omega1`, `omega1 + omega3`, `omega3`: the roots of `4t^3 - g2 t - g3`, decreasing.
    e: [f64; 3],
    eta1: f64,
    /// `eta3 = zeta(omega3) = i * eta3_im`.
    eta3_im: f64,
    tall: TallLattice,
    rotated: bool,
}

/// Lattice with `omega3_im >= omega1`, where the q-series converge fast.
#[derive(Clone, Debug, PartialEq)]
struct TallLattice {
    omega1: f64,
    eta1: f64,
    /// `q^{2n}` for `n = 1, 2, ...` until negligible, `q = e^{-pi omega3_im / omega1}`.
    q2n: Vec<f64>,
}

/// Lattice invariants and the largest root `(g2, g3, e1)`.
pub fn lattice_invariants(omega1: f64, omega3_im: f64) -> Result<(f64, f64, f64)> {
    let lat = Lattice::new(omega1, omega3_im)?;
    Ok((lat.g2, lat.g3, lat.e[0]))
}

fn divisor_sums(n: usize) -> (f64, f64, f64) {
    let (mut d1, mut d3, mut d5) = (0.0, 0.0, 0.0);
    for d in (1..=n).filter(|d| n % d == 0) {
        let d = d as f64;
        d1 += d;
        d3 += d.powi(3);
        d5 += d.powi(5);
    }
    (d1, d3, d5)
}

impl TallLattice {
    /// Returns the lattice with `(g2, g3)` from the Eisenstein q-expansions.
    fn new(omega1: f64, omega3_im: f64) -> (Self, f64, f64) {
        let q2 = (-2.0 * PI * omega3_im / omega1).exp();
        let mut q2n = Vec::new();
        let (mut s1, mut s3, mut s5) = (0.0, 0.0, 0.0);
        let mut p = 1.0;
        for n in 1.. {
            p *= q2;
            if p < SERIES_TOL {
                break;
            }
            q2n.push(p);
            let (d1, d3, d5) = divisor_sums(n);
            s1 += d1 * p;
            s3 += d3 * p;
            s5 += d5 * p;
        }
        let a = PI / omega1;
        let g2 = a.powi(4) / 12.0 * (1.0 + 240.0 * s3);
        let g3 = a.powi(6) / 216.0 * (1.0 - 504.0 * s5);
        let eta1 = PI * PI / (12.0 * omega1) * (1.0 - 24.0 * s1);
        (Self { omega1, eta1, q2n }, g2, g3)
    }

    /// `(wp, wp', zeta, ln sigma)` for `|Im z| <= omega3_im`.
    fn eval(&self, z: Complex64) -> Values {
        let w = self.omega1;
        let k = PI / (2.0 * w);
        let u = k * z;
        let (s, c) = (u.sin(), u.cos());
        let csc2 = (s * s).inv();
        let cot = c / s;
        let mut wp = -self.eta1 / w + k * k * csc2;
        let mut wpd = -2.0 * k * k * k * csc2 * cot;
        let mut zeta = self.eta1 * z / w + k * cot;
        let mut log_sigma = (2.0 * w / PI).ln() + self.eta1 * z * z / (2.0 * w) + s.ln();
        let two_u = 2.0 * u;
        let cos2u = two_u.cos();
        for (i, &p) in self.q2n.iter().enumerate() {
            let n = (i + 1) as f64;
            let r = p / (1.0 - p);
            let (sn, cn) = ((n * two_u).sin(), (n * two_u).cos());
            wp -= 8.0 * k * k * n * r * cn;
            wpd += 16.0 * k * k * k * n * n * r * sn;
            zeta += 4.0 * k * r * sn;
            log_sigma += (1.0 - 2.0 * p * cos2u + p * p).ln() - 2.0 * (1.0 - p).ln();
        }
        Values {
            wp,
            wp_prime: wpd,
            zeta,
            log_sigma,
        }
    }
}

impl Lattice {
    pub fn new(omega1: f64, omega3_im: f64) -> Result<Self> {
        if !(omega1.is_finite() && omega1 > 0.0 && omega3_im.is_finite() && omega3_im > 0.0) {
            return Err(Error::Parameter(format!(
                "half-periods must be positive, got omega1={omega1}, omega3_im={omega3_im}"
            )));
        }
        let rotated = omega3_im < omega1;
        let (tall, g2, g3, eta1) = if rotated {
            // L = i L' with L' = (omega3_im, omega1): g2 -> g2, g3 -> -g3, and
            // eta1 = -Im zeta(omega3'; L') follows from Legendre's relation on L'.
            let (tall, g2, g3) = TallLattice::new(omega3_im, omega1);
            let eta1 = (0.5 * PI - tall.eta1 * omega1) / omega3_im;
            (tall, g2, -g3, eta1)
        } else {
            let (tall, g2, g3) = TallLattice::new(omega1, omega3_im);
            let eta1 = tall.eta1;
            (tall, g2, g3, eta1)
        };
        // Legendre relation eta1 omega3 - eta3 omega1 = i pi / 2.
        let eta3_im = (eta1 * omega3_im - 0.5 * PI) / omega1;
        let mut lat = Self {
            omega1,
            omega3_im,
            g2,
            g3,
            e: [0.0; 3],
            eta1,
            eta3_im,
            tall,
            rotated,
        };
        // Direct evaluation at the half-periods; the cubic is ill-conditioned when e1 ~ e2.
        let half = [
            Complex64::new(omega1, 0.0),
            Complex64::new(omega1, omega3_im),
            Complex64::new(0.0, omega3_im),
        ];
        for (slot, z) in half.into_iter().enumerate() {
            let (z0, _, _) = lat.reduce(z);
            lat.e[slot] = lat.eval_reduced(z0).wp.re;
        }
        Ok(lat)
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega3_im(&self) -> f64 {
        self.omega3_im
    }

    pub fn omega3(&self) -> Complex64 {
        Complex64::new(0.0, self.omega3_im)
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    pub fn g3(&self) -> f64 {
        self.g3
    }

    /// `wp(omega1)`, the largest root.
    pub fn e1(&self) -> f64 {
        self.e[0]
    }

    /// `wp(omega1 + omega3)`.
    pub fn e2(&self) -> f64 {
        self.e[1]
    }

    /// `wp(omega3)`, the smallest root.
    pub fn e3(&self) -> f64 {
        self.e[2]
    }

    /// `zeta(omega1)`.
    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    /// `zeta(omega3) = i * eta3_im`.
    pub fn eta3(&self) -> Complex64 {
        Complex64::new(0.0, self.eta3_im)
    }

    pub fn real_period(&self) -> f64 {
        2.0 * self.omega1
    }

    /// Splits `z = z0 + 2 m omega1 + 2 n omega3` with `z0` in the centred cell.
    fn reduce(&self, z: Complex64) -> (Complex64, f64, f64) {
        let m = (z.re / (2.0 * self.omega1)).round();
        let n = (z.im / (2.0 * self.omega3_im)).round();
        let z0 = Complex64::new(z.re - 2.0 * m * self.omega1, z.im - 2.0 * n * self.omega3_im);
        (z0, m, n)
    }

    /// Values at a reduced point, rotating wide lattices onto their tall partner.
    fn eval_reduced(&self, z0: Complex64) -> Values {
        if !self.rotated {
            return self.tall.eval(z0);
        }
        // wp(z) = -wp'(-iz), wp'(z) = i wp'(-iz), zeta(z) = -i zeta(-iz), sigma(z) = i sigma(-iz).
        let i = Complex64::new(0.0, 1.0);
        let v = self.tall.eval(-i * z0);
        Values {
            wp: -v.wp,
            wp_prime: i * v.wp_prime,
            zeta: -i * v.zeta,
            log_sigma: v.log_sigma + Complex64::new(0.0, 0.5 * PI),
        }
    }

    fn eval(&self, z: Complex64, need_pole_check: bool) -> Result<Option<(Values, Complex64, f64, f64)>> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite argument {z}")));
        }
        let (z0, m, n) = self.reduce(z);
        if need_pole_check && z0.norm() < POLE_TOL {
            return Err(Error::PoleProximity { distance: z0.norm() });
        }
        if z0.norm() == 0.0 {
            return Ok(None);
        }
        Ok(Some((self.eval_reduced(z0), z0, m, n)))
    }

    fn eval_checked(&self, z: Complex64) -> Result<(Values, Complex64, f64, f64)> {
        self.eval(z, true)?.ok_or(Error::PoleProximity { distance: 0.0 })
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_checked(z)?.0.wp)
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_checked(z)?.0.wp_prime)
    }

    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        let (v, _, m, n) = self.eval_checked(z)?;
        Ok(v.zeta + 2.0 * m * self.eta1 + 2.0 * n * self.eta3())
    }

    /// `ln sigma(z)` modulo `2 pi i`, via
    /// `sigma(z0 + 2m omega1 + 2n omega3) = (-1)^{m+n+mn} e^{(2m eta1 + 2n eta3)(z0 + m omega1 + n omega3)} sigma(z0)`.
    pub fn log_sigma(&self, z: Complex64) -> Result<Complex64> {
        let (v, z0, m, n) = self.eval_checked(z)?;
        let shift = 2.0 * m * self.eta1 + 2.0 * n * self.eta3();
        let centre = z0 + m * self.omega1 + n * self.omega3();
        let parity = (m + n + m * n).rem_euclid(2.0);
        let sign_phase = Complex64::new(0.0, if parity == 0.0 { 0.0 } else { PI });
        Ok(v.log_sigma + shift * centre + sign_phase)
    }

    pub fn sigma(&self, z: Complex64) -> Result<Complex64> {
        match self.eval(z, false)? {
            None => Ok(Complex64::new(0.0, 0.0)),
            Some(_) => Ok(self.log_sigma(z)?.exp()),
        }
    }

    /// `wp` at a real argument.
    pub fn wp_real(&self, x: f64) -> Result<f64> {
        Ok(self.wp(Complex64::new(x, 0.0))?.re)
    }
}

#[derive(Clone, Copy, Debug)]
struct Values {
    wp: Complex64,
    wp_prime: Complex64,
    zeta: Complex64,
    log_sigma: Complex64,
}
