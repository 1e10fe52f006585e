use num_complex::Complex64;

use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

/// Real samples on a [`PeriodicGrid`] together with their Fourier coefficients.
///
/// Values are immutable: every operation returns a new field, so the spectrum
/// can never go stale relative to the samples.
#[derive(Clone, Debug)]
pub struct Field {
    grid: PeriodicGrid,
    samples: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl Field {
    pub fn from_samples(grid: &PeriodicGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                grid.n(),
                samples.len()
            )));
        }
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at node {j}")));
        }
        let spectrum = grid.forward(&samples);
        Ok(Self {
            grid: grid.clone(),
            samples,
            spectrum,
        })
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..grid.n()).map(|j| f(grid.node(j))).collect();
        Self::from_samples(grid, samples)
    }

    pub fn try_from_fn(grid: &PeriodicGrid, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let samples = (0..grid.n())
            .map(|j| f(grid.node(j)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(grid, samples)
    }

    /// Builds a real field from coefficients; only the Hermitian part is kept.
    pub fn from_spectrum(grid: &PeriodicGrid, spectrum: Vec<Complex64>) -> Result<Self> {
        let n = grid.n();
        if spectrum.len() != n {
            return Err(Error::InvalidInput(format!(
                "expected {n} coefficients, got {}",
                spectrum.len()
            )));
        }
        if spectrum.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let mut sym = spectrum;
        sym[0].im = 0.0;
        sym[n / 2].im = 0.0;
        for k in 1..n / 2 {
            let avg = 0.5 * (sym[k] + sym[n - k].conj());
            sym[k] = avg;
            sym[n - k] = avg.conj();
        }
        let samples = grid.inverse(&sym);
        Ok(Self {
            grid: grid.clone(),
            samples,
            spectrum: sym,
        })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &PeriodicGrid, c: f64) -> Self {
        let n = grid.n();
        let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
        spectrum[0] = Complex64::new(c, 0.0);
        Self {
            grid: grid.clone(),
            samples: vec![c; n],
            spectrum,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Coefficients in FFT order, normalized so that `spectrum()[0]` is the mean.
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidInput(format!(
                "grid mismatch: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_samples(&self.grid, self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_grid(other)?;
        let s = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_samples(&self.grid, s)
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn mul(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|v| c * v).collect(),
            spectrum: self.spectrum.iter().map(|z| c * z).collect(),
        }
    }

    /// `a * self + b * other`, computed on samples and spectra alike.
    pub fn linear_combination(&self, a: f64, other: &Field, b: f64) -> Result<Self> {
        self.check_grid(other)?;
        let samples: Vec<f64> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| a * x + b * y)
            .collect();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite linear combination".into()));
        }
        let spectrum = self
            .spectrum
            .iter()
            .zip(&other.spectrum)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            samples,
            spectrum,
        })
    }

    /// Multiplies coefficient `k` by `m[k]`; the caller guarantees Hermitian symmetry.
    pub(crate) fn with_symbol_values(&self, m: &[Complex64]) -> Self {
        let spectrum: Vec<Complex64> = self.spectrum.iter().zip(m).map(|(c, s)| c * s).collect();
        let samples = self.grid.inverse(&spectrum);
        Self {
            grid: self.grid.clone(),
            samples,
            spectrum,
        }
    }

    /// Spectral derivative of the given order. The Nyquist mode of odd orders is zeroed.
    pub fn derivative(&self, order: u32) -> Self {
        let n = self.grid.n();
        let m: Vec<Complex64> = self
            .grid
            .wavenumbers()
            .iter()
            .enumerate()
            .map(|(k, &xi)| {
                if k == n / 2 && order % 2 == 1 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, xi).powu(order)
                }
            })
            .collect();
        self.with_symbol_values(&m)
    }

    /// `x -> f(x + delta)`, exact for band-limited fields.
    pub fn shifted(&self, delta: f64) -> Self {
        let n = self.grid.n();
        let m: Vec<Complex64> = self
            .grid
            .wavenumbers()
            .iter()
            .enumerate()
            .map(|(k, &xi)| {
                if k == n / 2 {
                    Complex64::new((xi * delta).cos(), 0.0)
                } else {
                    Complex64::from_polar(1.0, xi * delta)
                }
            })
            .collect();
        self.with_symbol_values(&m)
    }

    /// `x -> f(x + j * dx)` by index rotation.
    pub fn rotated(&self, j: isize) -> Self {
        let n = self.grid.n() as isize;
        let s = (0..n)
            .map(|i| self.samples[(i + j).rem_euclid(n) as usize])
            .collect();
        Self::from_samples(&self.grid, s).expect("rotation keeps samples finite")
    }

    /// Zeroes every mode with `|k| > n/3`.
    pub fn dealiased(&self) -> Self {
        let cut = self.grid.dealias_cutoff() as isize;
        let m: Vec<Complex64> = (0..self.grid.n())
            .map(|k| {
                let v = if self.grid.signed_index(k).abs() > cut { 0.0 } else { 1.0 };
                Complex64::new(v, 0.0)
            })
            .collect();
        self.with_symbol_values(&m)
    }

    /// Zero-pads (or truncates) the spectrum onto `target`, which must share the period.
    pub fn resampled(&self, target: &PeriodicGrid) -> Result<Self> {
        if target.period() != self.grid.period() {
            return Err(Error::InvalidInput("resampling requires equal periods".into()));
        }
        let (n, m) = (self.grid.n(), target.n());
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        let half = n.min(m) / 2;
        out[0] = self.spectrum[0];
        for k in 1..half {
            out[k] = self.spectrum[k];
            out[m - k] = self.spectrum[n - k];
        }
        if m > n {
            let c = 0.5 * self.spectrum[half];
            out[half] = c;
            out[m - half] = c;
        } else {
            let c = self.spectrum[half] + self.spectrum[n - half];
            out[half] = Complex64::new(if m == n { self.spectrum[half].re } else { c.re }, 0.0);
        }
        Self::from_spectrum(target, out)
    }

    pub fn mean(&self) -> f64 {
        self.spectrum[0].re
    }

    /// Trapezoidal integral over one period (exact for band-limited integrands).
    pub fn integral(&self) -> f64 {
        self.grid.period() * self.samples.iter().sum::<f64>() / self.grid.n() as f64
    }

    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.check_grid(other)?;
        let s: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).sum();
        Ok(s * self.grid.dx())
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(integral of f^2)^(1/2)` over one period.
    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fraction of `sum |c_k|^2` carried by modes with `|k| > cutoff`.
    pub fn tail_fraction(&self, cutoff: usize) -> f64 {
        let mut total = 0.0;
        let mut tail = 0.0;
        for (k, c) in self.spectrum.iter().enumerate() {
            let e = c.norm_sqr();
            total += e;
            if self.grid.signed_index(k).unsigned_abs() > cutoff {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}
