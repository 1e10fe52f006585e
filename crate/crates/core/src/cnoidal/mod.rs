//! Cnoidal waves of `u_t = -u''' + 6 u u'` in Weierstrass and Jacobi form, and their
//! traveling-wave structure under the `H_kappa` flow.

mod asymptotics;

pub use asymptotics::{asymptotics_table, AsymptoticsRow, AsymptoticsTable};

use num_complex::Complex64;

use crate::elliptic::{complete_integrals, jacobi_cn, solve_b, BranchPoint, Lattice};
use crate::error::{Error, Result};
use crate::spectral::{Field, PeriodicGrid};

/// Invariants this module guarantees; the verify suite runs one check per name.
pub const INVARIANTS: &[&str] = &[
    "closed-form-wronskian",
    "closed-form-green",
    "closed-form-multiplier",
    "hk-green-affine",
    "kdv-profile-residual",
    "jacobi-weierstrass",
    "hk-speed-limit",
    "asymptotics",
];

/// Imaginary residue above this is a lattice-configuration error.
pub const IMAG_ERROR_TOL: f64 = 1e-8;
/// Imaginary residue at or below this is silently discarded.
pub const IMAG_DISCARD_TOL: f64 = 1e-10;

fn real_part(z: Complex64, scale: f64) -> Result<f64> {
    let residue = z.im.abs() / scale.max(1.0);
    if residue > IMAG_ERROR_TOL {
        return Err(Error::LatticeConfiguration { residue });
    }
    if residue > IMAG_DISCARD_TOL {
        log_residue(residue);
    }
    Ok(z.re)
}

#[cold]
fn log_residue(residue: f64) {
    eprintln!("warning: discarding imaginary residue {residue:e} in cnoidal profile");
}

/// `V(t, x) = 2 wp(x + 6 e1 t + omega3) + e1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CnoidalWeierstrass {
    pub lat: Lattice,
}

impl CnoidalWeierstrass {
    pub fn new(lat: Lattice) -> Self {
        Self { lat }
    }

    pub fn from_half_periods(omega1: f64, omega3_im: f64) -> Result<Self> {
        Ok(Self::new(Lattice::new(omega1, omega3_im)?))
    }

    /// Spatial period `2 omega1`.
    pub fn period(&self) -> f64 {
        self.lat.real_period()
    }

    /// Rate of the leftward translation: `V(t, x) = V(0, x + kdv_speed t)`.
    pub fn kdv_speed(&self) -> f64 {
        6.0 * self.lat.e1()
    }

    pub fn profile(&self, t: f64, x: f64) -> Result<f64> {
        self.profile_at(x + self.kdv_speed() * t)
    }

    /// `V(0, y)`.
    fn profile_at(&self, y: f64) -> Result<f64> {
        let w = self.lat.wp(Complex64::new(y, 0.0) + self.lat.omega3())?;
        Ok(2.0 * real_part(w, w.norm())? + self.lat.e1())
    }

    /// Average over one period, from `integral of wp(x + omega3) = -2 eta1`.
    pub fn mean(&self) -> f64 {
        self.lat.e1() - 2.0 * self.lat.eta1() / self.lat.omega1()
    }

    /// Grid of `n` points over one period.
    pub fn grid(&self, n: usize) -> Result<PeriodicGrid> {
        PeriodicGrid::new(self.period(), n)
    }

    /// Samples at time `t`; the grid must span exactly one period.
    pub fn field(&self, grid: &PeriodicGrid, t: f64) -> Result<Field> {
        self.check_grid(grid)?;
        Field::try_from_fn(grid, |x| self.profile(t, x))
    }

    /// Samples of `V(0, x + shift)`.
    pub fn translate(&self, grid: &PeriodicGrid, shift: f64) -> Result<Field> {
        self.check_grid(grid)?;
        Field::try_from_fn(grid, |x| self.profile_at(x + shift))
    }

    fn check_grid(&self, grid: &PeriodicGrid) -> Result<()> {
        if (grid.period() - self.period()).abs() > 1e-12 * self.period() {
            return Err(Error::InvalidInput(format!(
                "grid period {} differs from the cnoidal period {}",
                grid.period(),
                self.period()
            )));
        }
        Ok(())
    }

    /// Jacobi parameters reproducing this wave up to its mean.
    pub fn matched_jacobi(&self) -> Result<CnoidalJacobi> {
        let h = 2.0 * (self.lat.e2() - self.lat.e3());
        CnoidalJacobi::matching(self.period(), h)
    }
}

pub fn profile_weierstrass(lat: &Lattice, t: f64, x: f64) -> Result<f64> {
    CnoidalWeierstrass::new(lat.clone()).profile(t, x)
}

/// `V(t, x) = eta - h cn^2(sqrt(h / 2k^2) (x - c t); k)`, with zero mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnoidalJacobi {
    pub k: f64,
    pub h: f64,
    /// Crest level.
    pub eta: f64,
    pub speed: f64,
}

impl CnoidalJacobi {
    pub fn new(k: f64, h: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::Parameter(format!("modulus must lie in [0, 1), got {k}")));
        }
        // At k = 0 the wavenumber sqrt(h / 2k^2) and the speed diverge; only cn(z; 0) = cos z survives.
        if k == 0.0 {
            return Err(Error::Parameter(
                "the k = 0 cnoidal wave has infinite wavenumber".into(),
            ));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Parameter(format!("wave height must be positive, got {h}")));
        }
        let (kk, ee) = complete_integrals(k)?;
        let r = ee / kk;
        let k2 = k * k;
        Ok(Self {
            k,
            h,
            eta: h / k2 * (r - 1.0 + k2),
            speed: 2.0 * h / k2 * (2.0 - k2 - 3.0 * r),
        })
    }

    /// Modulus `k` and height `h` with spatial period `2K(k) sqrt(2k^2/h) = period`.
    pub fn matching(period: f64, h: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0 && h.is_finite() && h > 0.0) {
            return Err(Error::Parameter(format!(
                "period and height must be positive, got {period} and {h}"
            )));
        }
        let target = period * h.sqrt() / (2.0 * std::f64::consts::SQRT_2);
        // k K(k) increases from 0 to infinity on [0, 1).
        let f = |k: f64| -> Result<f64> { Ok(k * complete_integrals(k)?.0 - target) };
        let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::new(0.5 * (lo + hi), h)
    }

    pub fn wavenumber(&self) -> f64 {
        (self.h / (2.0 * self.k * self.k)).sqrt()
    }

    pub fn period(&self) -> Result<f64> {
        Ok(2.0 * complete_integrals(self.k)?.0 / self.wavenumber())
    }

    pub fn profile(&self, t: f64, x: f64) -> Result<f64> {
        let cn = jacobi_cn(self.wavenumber() * (x - self.speed * t), self.k)?;
        Ok(self.eta - self.h * cn * cn)
    }
}

pub fn profile_jacobi(k: f64, h: f64, t: f64, x: f64) -> Result<f64> {
    CnoidalJacobi::new(k, h)?.profile(t, x)
}

/// The cnoidal profile as a traveling wave of the `H_kappa` flow.
#[derive(Clone, Debug, PartialEq)]
pub struct HkTravelingWave {
    pub lat: Lattice,
    pub kappa: f64,
    pub b: BranchPoint,
    /// `V_kappa(t, x) = V(0, x + nu t)`.
    pub nu: f64,
    pub c1: f64,
    pub c2: f64,
}

impl HkTravelingWave {
    /// `g(x; kappa, V) = c1 + c2 V(x)`.
    pub fn green(&self, grid: &PeriodicGrid) -> Result<Field> {
        let v = CnoidalWeierstrass::new(self.lat.clone()).field(grid, 0.0)?;
        v.map(|v| self.c1 + self.c2 * v)
    }

    pub fn profile(&self, t: f64, x: f64) -> Result<f64> {
        CnoidalWeierstrass::new(self.lat.clone()).profile_at(x + self.nu * t)
    }

    pub fn field(&self, grid: &PeriodicGrid, t: f64) -> Result<Field> {
        CnoidalWeierstrass::new(self.lat.clone()).translate(grid, self.nu * t)
    }
}

pub fn hk_traveling_wave(lat: &Lattice, kappa: f64) -> Result<HkTravelingWave> {
    let b = solve_b(kappa, lat)?;
    let wp_b = lat.wp_real(b.b)?;
    let dwp_b = lat.wp_prime(Complex64::new(b.b, 0.0))?.re;
    Ok(HkTravelingWave {
        lat: lat.clone(),
        kappa,
        b,
        nu: 8.0 * kappa.powi(5) / dwp_b + 4.0 * kappa * kappa,
        c1: (wp_b + 0.5 * lat.e1()) / -dwp_b,
        c2: 0.5 / dwp_b,
    })
}

/// Closed-form Floquet solutions of `-psi'' + V psi = -kappa^2 psi` for the cnoidal `V(0, .)`.
///
/// `psi_+- = a_+- sigma(x + omega3 +- b) / (sigma(x + omega3) sigma(+-b)) e^{-+ zeta(b) x}`
/// up to a constant unimodular factor, which is removed so that both are real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct FloquetClosedForm {
    pub lat: Lattice,
    pub kappa: f64,
    pub b: f64,
    log_a: f64,
    zeta_b: f64,
    log_sigma_b: f64,
    /// `Im ln psi_+-(0)`, subtracted from every evaluation.
    phase: [f64; 2],
}

fn wrap_phase(p: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    p - tau * (p / tau).round()
}

impl FloquetClosedForm {
    pub fn new(lat: &Lattice, kappa: f64) -> Result<Self> {
        let b = solve_b(kappa, lat)?.b;
        let dwp = lat.wp_prime(Complex64::new(b, 0.0))?.re;
        if !(dwp < 0.0) {
            return Err(Error::Consistency(format!("wp'(b) = {dwp} is not negative")));
        }
        let mut out = Self {
            lat: lat.clone(),
            kappa,
            b,
            log_a: -0.5 * (-dwp).ln(),
            zeta_b: lat.zeta(Complex64::new(b, 0.0))?.re,
            log_sigma_b: lat.log_sigma(Complex64::new(b, 0.0))?.re,
            phase: [0.0; 2],
        };
        out.phase = [out.raw_log(1.0, 0.0)?.im, out.raw_log(-1.0, 0.0)?.im];
        Ok(out)
    }

    /// `ln |a| + ln sigma(x + omega3 + s b) - ln sigma(x + omega3) - ln |sigma(b)| - s zeta(b) x`.
    fn raw_log(&self, s: f64, x: f64) -> Result<Complex64> {
        let z = Complex64::new(x, 0.0) + self.lat.omega3();
        let top = self.lat.log_sigma(z + s * self.b)?;
        let bottom = self.lat.log_sigma(z)?;
        Ok(top - bottom + (self.log_a - self.log_sigma_b - s * self.zeta_b * x))
    }

    fn log_psi(&self, s: f64, x: f64) -> Result<f64> {
        let l = self.raw_log(s, x)?;
        let idx = if s > 0.0 { 0 } else { 1 };
        let residue = wrap_phase(l.im - self.phase[idx]).abs();
        if residue > IMAG_ERROR_TOL {
            return Err(Error::LatticeConfiguration { residue });
        }
        Ok(l.re)
    }

    /// `(ln psi_+(x), ln psi_-(x))`.
    pub fn log_psi_pair(&self, x: f64) -> Result<(f64, f64)> {
        Ok((self.log_psi(1.0, x)?, self.log_psi(-1.0, x)?))
    }

    pub fn psi_pair(&self, x: f64) -> Result<(f64, f64)> {
        let (p, m) = self.log_psi_pair(x)?;
        Ok((p.exp(), m.exp()))
    }

    /// `(psi_+'/psi_+, psi_-'/psi_-)` from `zeta(x + omega3 +- b) - zeta(x + omega3) -+ zeta(b)`.
    pub fn dlog_psi_pair(&self, x: f64) -> Result<(f64, f64)> {
        let z = Complex64::new(x, 0.0) + self.lat.omega3();
        let base = self.lat.zeta(z)?;
        let plus = self.lat.zeta(z + self.b)? - base - self.zeta_b;
        let minus = self.lat.zeta(z - self.b)? - base + self.zeta_b;
        let scale = base.norm().max(self.zeta_b.abs());
        Ok((real_part(plus, scale)?, real_part(minus, scale)?))
    }

    /// `psi_+ psi_-` without forming either factor.
    pub fn product(&self, x: f64) -> Result<f64> {
        let (p, m) = self.log_psi_pair(x)?;
        Ok((p + m).exp())
    }

    /// `e^{-2 omega1 zeta(b)}`: the multiplier of `psi_+` as stated alongside the ansatz.
    pub fn stated_multiplier(&self) -> f64 {
        (-2.0 * self.lat.omega1() * self.zeta_b).exp()
    }

    /// `e^{2 eta1 b - 2 omega1 zeta(b)}`: the multiplier of `psi_+` implied by the
    /// quasi-periodicity `sigma(z + 2 omega1) = -e^{2 eta1 (z + omega1)} sigma(z)`.
    pub fn multiplier(&self) -> f64 {
        (2.0 * self.lat.eta1() * self.b - 2.0 * self.lat.omega1() * self.zeta_b).exp()
    }
}

/// `(psi_+(x), psi_-(x))`.
pub fn floquet_closed_form(lat: &Lattice, kappa: f64, x: f64) -> Result<(f64, f64)> {
    FloquetClosedForm::new(lat, kappa)?.psi_pair(x)
}

#[cfg(test)]
mod tests;
