use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

/// Uniform grid on the circle of length `period` with `n` nodes `x_j = j * period / n`.
#[derive(Clone)]
pub struct PeriodicGrid {
    period: f64,
    n: usize,
    plans: Arc<Plans>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("period", &self.period)
            .field("n", &self.n)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.period == other.period
    }
}

impl PeriodicGrid {
    pub fn new(period: f64, n: usize) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::Parameter(format!("period must be positive, got {period}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        let (forward, inverse) = {
            let mut p = planner().lock().expect("fft planner poisoned");
            (p.plan_fft_forward(n), p.plan_fft_inverse(n))
        };
        let base = 2.0 * PI / period;
        let wavenumbers = (0..n)
            .map(|k| base * signed_index(k, n) as f64)
            .collect();
        Ok(Self {
            period,
            n,
            plans: Arc::new(Plans {
                forward,
                inverse,
                wavenumbers,
            }),
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Frequencies in FFT order; the Nyquist slot carries `+pi n / period`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.plans.wavenumbers
    }

    pub fn signed_index(&self, k: usize) -> isize {
        signed_index(k, self.n)
    }

    pub fn is_nyquist(&self, k: usize) -> bool {
        k == self.n / 2
    }

    /// Largest retained mode index under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    /// Same period, `factor` times as many nodes.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.period, self.n * factor)
    }

    /// Coefficients `(1/n) sum_j f_j e^{-i xi x_j}`.
    pub(crate) fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.plans.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Real part of the synthesis `sum_k c_k e^{i xi x_j}`.
    pub(crate) fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut buf = spectrum.to_vec();
        self.plans.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

pub(crate) fn signed_index(k: usize, n: usize) -> isize {
    if k <= n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(PeriodicGrid::new(1.0, 4).is_err());
        assert!(PeriodicGrid::new(1.0, 48).is_err());
        assert!(PeriodicGrid::new(0.0, 16).is_err());
        assert!(PeriodicGrid::new(-1.0, 16).is_err());
        assert!(PeriodicGrid::new(1.0, 16).is_ok());
    }

    #[test]
    fn nodes_are_equispaced() {
        let g = PeriodicGrid::new(2.5, 16).unwrap();
        let x = g.nodes();
        for w in x.windows(2) {
            assert!((w[1] - w[0] - g.dx()).abs() < 1e-15);
        }
        assert_eq!(x[0], 0.0);
    }

    #[test]
    fn wavenumber_layout() {
        let g = PeriodicGrid::new(1.0, 8).unwrap();
        let k: Vec<isize> = (0..8).map(|i| g.signed_index(i)).collect();
        assert_eq!(k, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert!((g.wavenumbers()[1] - 2.0 * PI).abs() < 1e-15);
    }
}
