//! Line-mode quadrature for the Hilbert-Schmidt identity
//! `|| sqrt(R0) q sqrt(R0) ||_{I2}^2 = kappa^{-1} || q ||_{H^{-1}_kappa}^2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub const LINE_HALF_WIDTH: f64 = 12.0;
pub const LINE_POINTS: usize = 4096;

/// Edge values must sit below this fraction of the peak.
const TAIL_TOL: f64 = 1e-12;

/// Samples `q(x_j)`, `x_j = -W + j h`, `h = 2W / n`, of a function decaying inside `[-W, W]`.
#[derive(Clone, Debug)]
pub struct LineFunction {
    half_width: f64,
    samples: Vec<f64>,
}

impl LineFunction {
    pub fn sample(half_width: f64, n: usize, q: impl Fn(f64) -> f64) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) || n < 8 {
            return Err(Error::Parameter(format!(
                "line window needs W > 0 and n >= 8, got W={half_width}, n={n}"
            )));
        }
        let h = 2.0 * half_width / n as f64;
        let samples = (0..n).map(|j| q(-half_width + j as f64 * h)).collect();
        Self::from_samples(half_width, samples)
    }

    pub fn sample_default(q: impl Fn(f64) -> f64) -> Result<Self> {
        Self::sample(LINE_HALF_WIDTH, LINE_POINTS, q)
    }

    pub fn from_samples(half_width: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite line sample".into()));
        }
        Ok(Self { half_width, samples })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.samples.len() as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Returns `(lhs, rhs)`: the double integral of `(e^{-kappa|x-y|} / 2 kappa)^2 q(x) q(y)`
/// and `kappa^{-1} * integral |q_hat|^2 / (xi^2 + 4 kappa^2)` with unitary `q_hat`.
///
/// The inner integral has a kink on the diagonal; the trapezoid sum is corrected
/// by its leading Euler-Maclaurin term `h^2 q(x) / (12 kappa)`.
pub fn hilbert_schmidt_identity_line(q: &LineFunction, kappa: f64) -> Result<(f64, f64)> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::Parameter(format!("kappa must be positive, got {kappa}")));
    }
    let s = &q.samples;
    let n = s.len();
    let peak = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok((0.0, 0.0));
    }
    let edge = s[0].abs().max(s[n - 1].abs());
    if edge > TAIL_TOL * peak {
        return Err(Error::Truncation {
            edge,
            limit: TAIL_TOL * peak,
        });
    }
    let h = q.step();

    // Toeplitz kernel e^{-2 kappa |i-j| h} / (4 kappa^2).
    let decay = (-2.0 * kappa * h).exp();
    let mut kernel = Vec::with_capacity(n);
    let mut v = 1.0 / (4.0 * kappa * kappa);
    for _ in 0..n {
        kernel.push(v);
        v *= decay;
    }
    let mut lhs = 0.0;
    for i in 0..n {
        if s[i] == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (j, &qj) in s.iter().enumerate() {
            inner += kernel[i.abs_diff(j)] * qj;
        }
        inner = h * inner - h * h * s[i] / (12.0 * kappa);
        lhs += s[i] * inner;
    }
    lhs *= h;

    // Unitary transform q_hat(xi_k) = h / sqrt(2 pi) * sum_j q_j e^{-i xi_k x_j}.
    let mut buf: Vec<Complex64> = s.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let period = 2.0 * q.half_width;
    let dxi = 2.0 * PI / period;
    let mut rhs = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let xi = dxi * super::grid::signed_index(k, n) as f64;
        // The phase from x_0 = -W does not affect |q_hat|.
        let mag2 = (h / (2.0 * PI).sqrt()).powi(2) * c.norm_sqr();
        rhs += dxi * mag2 / (xi * xi + 4.0 * kappa * kappa);
    }
    rhs /= kappa;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_function() {
        let q = LineFunction::sample_default(|_| 0.0).unwrap();
        assert_eq!(hilbert_schmidt_identity_line(&q, 2.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn gaussian() {
        let q = LineFunction::sample_default(|x| (-x * x).exp()).unwrap();
        let (lhs, rhs) = hilbert_schmidt_identity_line(&q, 2.0).unwrap();
        assert!(((lhs - rhs) / rhs).abs() <= 1e-6, "{lhs} {rhs}");
    }

    #[test]
    fn modulated_gaussian() {
        let q = LineFunction::sample_default(|x| (-x * x).exp() * (3.0 * x).sin()).unwrap();
        let (lhs, rhs) = hilbert_schmidt_identity_line(&q, 1.0).unwrap();
        assert!(((lhs - rhs) / rhs).abs() <= 1e-6, "{lhs} {rhs}");
    }

    #[test]
    fn rhs_matches_closed_form_for_gaussian() {
        // |q_hat|^2 = e^{-xi^2/2}/2 for q = e^{-x^2}; integrate against (xi^2 + 4 kappa^2)^{-1}
        // with a fine Simpson rule on [-40, 40].
        let kappa = 1.5;
        let q = LineFunction::sample_default(|x| (-x * x).exp()).unwrap();
        let (_, rhs) = hilbert_schmidt_identity_line(&q, kappa).unwrap();
        let m = 80_000;
        let a = 40.0;
        let dh = 2.0 * a / m as f64;
        let f = |xi: f64| 0.5 * (-xi * xi / 2.0).exp() / (xi * xi + 4.0 * kappa * kappa);
        let mut s = 0.0;
        for i in 0..=m {
            let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(-a + i as f64 * dh);
        }
        let want = s * dh / 3.0 / kappa;
        assert!(((rhs - want) / want).abs() < 1e-12);
    }

    #[test]
    fn truncation_error() {
        let q = LineFunction::sample_default(|x| (-x * x / 50.0).exp()).unwrap();
        let err = hilbert_schmidt_identity_line(&q, 1.0).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }
}
