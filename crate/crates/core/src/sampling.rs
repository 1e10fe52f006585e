//! Seeded random smooth fields for property checks.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::spectral::{Field, PeriodicGrid};

/// Coefficients `(a + i b) e^{-k / decay}` for `1 <= k <= max_mode`, `a, b ~ U(-1, 1)`,
/// rescaled to the requested sup norm. The mean is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothFieldSpec {
    pub max_mode: usize,
    pub decay: f64,
    pub amplitude: f64,
}

impl SmoothFieldSpec {
    pub fn new(max_mode: usize, decay: f64, amplitude: f64) -> Self {
        Self {
            max_mode,
            decay,
            amplitude,
        }
    }
}

pub fn smooth_random_field<R: Rng + ?Sized>(
    grid: &PeriodicGrid,
    spec: SmoothFieldSpec,
    rng: &mut R,
) -> Result<Field> {
    let n = grid.n();
    if spec.max_mode == 0 || spec.max_mode >= n / 2 {
        return Err(Error::Parameter(format!(
            "max_mode must lie in 1..{}, got {}",
            n / 2,
            spec.max_mode
        )));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..=spec.max_mode {
        let w = (-(k as f64) / spec.decay).exp();
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w;
        coeffs[k] = c;
        coeffs[n - k] = c.conj();
    }
    let f = Field::from_spectrum(grid, coeffs)?;
    let sup = f.sup_norm();
    if sup == 0.0 {
        return Ok(f);
    }
    Ok(f.scale(spec.amplitude / sup))
}
