//! Time integration of KdV, KdV with a potential, the `H_kappa` flow and the
//! `H~_kappa` flow of a perturbation around a moving background.

mod diagnostics;
mod evolve;
mod stepper;

pub use diagnostics::{
    alpha_growth_monitor, commute_check, convergence_sweep, GrowthRatio, SweepConfig, SweepRow,
    SweepTable,
};
pub use evolve::{evolve, ConservedLedger, Trajectory};
pub use stepper::Stepper;

use std::str::FromStr;

use num_complex::Complex64;

use crate::cnoidal::{CnoidalWeierstrass, HkTravelingWave};
use crate::error::{Error, Result};
use crate::schrodinger::diagonal_green;
use crate::spectral::{Field, PeriodicGrid};

/// Invariants this module guarantees; the verify suite runs one check per name.
pub const INVARIANTS: &[&str] = &[
    "kdv-traveling-wave",
    "hk-traveling-wave",
    "kdv-conservation",
    "hk-conservation",
    "stepper-order",
    "time-reversal",
    "linearized-symbol",
    "momentum-growth",
    "commute",
];

/// The four evolutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowKind {
    /// `u_t = -u''' + 6 u u'`.
    Kdv,
    /// `q_t = -q''' + 6 q q' + 6 (V q)'`.
    KdvWithPotential,
    /// `q_t = 16 kappa^5 g'(kappa, q) + 4 kappa^2 q'`.
    Hk,
    /// `q_t = 16 kappa^5 [g'(kappa, q + V_kappa) - g'(kappa, V_kappa)] + 4 kappa^2 q'`.
    HkTilde,
}

impl FlowKind {
    pub fn name(self) -> &'static str {
        match self {
            FlowKind::Kdv => "kdv",
            FlowKind::KdvWithPotential => "kdv-potential",
            FlowKind::Hk => "hk",
            FlowKind::HkTilde => "hk-tilde",
        }
    }

    pub fn needs_kappa(self) -> bool {
        matches!(self, FlowKind::Hk | FlowKind::HkTilde)
    }

    pub fn uses_background(self) -> bool {
        matches!(self, FlowKind::KdvWithPotential | FlowKind::HkTilde)
    }
}

impl FromStr for FlowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kdv" => Ok(FlowKind::Kdv),
            "kdv-potential" | "kdv_with_potential" => Ok(FlowKind::KdvWithPotential),
            "hk" => Ok(FlowKind::Hk),
            "hk-tilde" | "hk_tilde" => Ok(FlowKind::HkTilde),
            other => Err(Error::InvalidInput(format!("unknown flow kind {other:?}"))),
        }
    }
}

/// Rule producing the background `V(t)` on the state grid.
#[derive(Clone, Debug)]
pub enum Background {
    Zero,
    /// `V(t, x) = v0(x + speed t)`, shifted spectrally.
    Translating { v0: Field, speed: f64 },
    /// Linear interpolation in time between tabulated states.
    Sampled { times: Vec<f64>, states: Vec<Field> },
}

impl Background {
    /// The KdV cnoidal wave, `V(0, x + 6 e1 t)`.
    pub fn cnoidal_kdv(wave: &CnoidalWeierstrass, grid: &PeriodicGrid) -> Result<Self> {
        Ok(Background::Translating {
            v0: wave.field(grid, 0.0)?,
            speed: wave.kdv_speed(),
        })
    }

    /// The cnoidal wave under the `H_kappa` flow, `V(0, x + nu t)`.
    pub fn cnoidal_hk(wave: &HkTravelingWave, grid: &PeriodicGrid) -> Result<Self> {
        Ok(Background::Translating {
            v0: wave.field(grid, 0.0)?,
            speed: wave.nu,
        })
    }

    pub fn sampled(times: Vec<f64>, states: Vec<Field>) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::InvalidInput(
                "sampled background needs one state per time".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("sampled background times must increase".into()));
        }
        if states.iter().any(|s| s.grid() != states[0].grid()) {
            return Err(Error::InvalidInput("sampled background states must share a grid".into()));
        }
        Ok(Background::Sampled { times, states })
    }

    pub fn at(&self, grid: &PeriodicGrid, t: f64) -> Result<Field> {
        let out = match self {
            Background::Zero => return Ok(Field::zeros(grid)),
            Background::Translating { v0, speed } => v0.shifted(speed * t),
            Background::Sampled { times, states } => {
                let (first, last) = (times[0], times[times.len() - 1]);
                let slack = 1e-12 * (last - first).abs().max(1.0);
                if t < first - slack || t > last + slack {
                    return Err(Error::InvalidInput(format!(
                        "t = {t} outside the sampled background range [{first}, {last}]"
                    )));
                }
                let i = times.partition_point(|&s| s <= t).clamp(1, times.len().max(2) - 1);
                if times.len() == 1 {
                    states[0].clone()
                } else {
                    let (t0, t1) = (times[i - 1], times[i]);
                    let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                    states[i - 1].linear_combination(1.0 - w, &states[i], w)?
                }
            }
        };
        if out.grid() != grid {
            return Err(Error::InvalidInput("background grid differs from the state grid".into()));
        }
        Ok(out)
    }
}

/// Everything `evolve` needs besides the initial state.
#[derive(Clone, Debug)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub kappa: Option<f64>,
    pub background: Background,
    pub dt: f64,
    /// Negative values integrate backward.
    pub t_final: f64,
    pub stepper: Stepper,
    pub dealias: bool,
    /// Ledger entries are written every `record_every` steps and at the end.
    pub record_every: usize,
    /// Energies `varkappa` at which the ledger tracks `alpha`.
    pub probe_kappas: Vec<f64>,
}

impl FlowSpec {
    pub fn new(kind: FlowKind, dt: f64, t_final: f64) -> Self {
        Self {
            kind,
            kappa: None,
            background: Background::Zero,
            dt,
            t_final,
            stepper: Stepper::Rk4MultiplierExact,
            dealias: true,
            record_every: 1,
            probe_kappas: Vec::new(),
        }
    }

    pub fn kappa(mut self, kappa: f64) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn background(mut self, background: Background) -> Self {
        self.background = background;
        self
    }

    pub fn stepper(mut self, stepper: Stepper) -> Self {
        self.stepper = stepper;
        self
    }

    pub fn dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn record_every(mut self, steps: usize) -> Self {
        self.record_every = steps;
        self
    }

    pub fn probe_kappas(mut self, probes: Vec<f64>) -> Self {
        self.probe_kappas = probes;
        self
    }

    /// Checks the parameters and that the right side can be evaluated on `q0`.
    pub fn validate(&self, q0: &Field) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !self.t_final.is_finite() {
            return Err(Error::Parameter("t_final must be finite".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Parameter("record_every must be at least 1".into()));
        }
        if let Some(p) = self.probe_kappas.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::Parameter(format!("probe kappa must be positive, got {p}")));
        }
        match (self.kind.needs_kappa(), self.kappa) {
            (true, None) => {
                return Err(Error::Parameter(format!("{} flow needs kappa", self.kind.name())))
            }
            (true, Some(k)) if !(k.is_finite() && k > 0.0) => {
                return Err(Error::Parameter(format!("kappa must be positive, got {k}")))
            }
            _ => {}
        }
        self.rhs(q0, 0.0).map(|_| ())
    }

    /// Full right side at time `t`. With `dealias`, the KdV products use the two-thirds rule;
    /// the steppers additionally drop the nonlinear part above `n/3` for every kind.
    pub fn rhs(&self, q: &Field, t: f64) -> Result<Field> {
        let kappa = || self.kappa.expect("validated kappa");
        match self.kind {
            FlowKind::Kdv => Ok(kdv_terms(q, None, self.dealias)?),
            FlowKind::KdvWithPotential => {
                let v = self.background.at(q.grid(), t)?;
                kdv_terms(q, Some(&v), self.dealias)
            }
            FlowKind::Hk => hk_terms(q, None, kappa()),
            FlowKind::HkTilde => {
                let v = self.background.at(q.grid(), t)?;
                hk_terms(q, Some(&v), kappa())
            }
        }
    }

    /// Symbol `m(xi)` of the stiff linear part, per FFT slot; zero at the Nyquist slot.
    pub fn linear_symbol(&self, grid: &PeriodicGrid) -> Vec<Complex64> {
        let k2 = self.kappa.map(|k| 4.0 * k * k);
        grid.wavenumbers()
            .iter()
            .enumerate()
            .map(|(i, &xi)| {
                if grid.is_nyquist(i) {
                    return Complex64::new(0.0, 0.0);
                }
                let m = match (self.kind, k2) {
                    (FlowKind::Hk | FlowKind::HkTilde, Some(k2)) => k2 * xi.powi(3) / (xi * xi + k2),
                    _ => xi.powi(3),
                };
                Complex64::new(0.0, m)
            })
            .collect()
    }
}

/// `a b` with the two-thirds rule: both factors and the product are truncated.
fn product(a: &Field, b: &Field, dealias: bool) -> Result<Field> {
    if dealias {
        Ok(a.dealiased().mul(&b.dealiased())?.dealiased())
    } else {
        a.mul(b)
    }
}

fn kdv_terms(q: &Field, v: Option<&Field>, dealias: bool) -> Result<Field> {
    let mut nonlinear = product(q, q, dealias)?.scale(3.0);
    if let Some(v) = v {
        nonlinear = nonlinear.linear_combination(1.0, &product(v, q, dealias)?, 6.0)?;
    }
    q.derivative(3).linear_combination(-1.0, &nonlinear.derivative(1), 1.0)
}

fn hk_terms(q: &Field, v: Option<&Field>, kappa: f64) -> Result<Field> {
    let g = match v {
        None => diagonal_green(q, kappa)?.g,
        Some(v) => {
            let total = diagonal_green(&q.add(v)?, kappa)?.g;
            total.sub(&diagonal_green(v, kappa)?.g)?
        }
    };
    g.derivative(1)
        .linear_combination(16.0 * kappa.powi(5), &q.derivative(1), 4.0 * kappa * kappa)
}

/// `-u''' + 3 (u^2)'` with the two-thirds rule applied to `u^2`.
pub fn rhs_kdv(u: &Field) -> Field {
    kdv_terms(u, None, true).expect("fields share a grid")
}

/// `-q''' + 6 q q' + 6 (V q)'`.
pub fn rhs_kdv_potential(q: &Field, v: &Field) -> Result<Field> {
    kdv_terms(q, Some(v), true)
}

/// `16 kappa^5 g'(kappa, q) + 4 kappa^2 q'`, with `g'` the spectral derivative of `g`.
pub fn rhs_hk(q: &Field, kappa: f64) -> Result<Field> {
    hk_terms(q, None, kappa)
}

/// `16 kappa^5 [g'(kappa, q + V_kappa) - g'(kappa, V_kappa)] + 4 kappa^2 q'`.
pub fn rhs_hk_tilde(q: &Field, kappa: f64, v_kappa: &Field) -> Result<Field> {
    hk_terms(q, Some(v_kappa), kappa)
}

/// `P = (1/2) integral of q^2`.
pub fn momentum(q: &Field) -> f64 {
    0.5 * q.inner(q).expect("same grid")
}

/// `H = integral of (q'^2 / 2 + q^3)`.
pub fn kdv_energy(q: &Field) -> f64 {
    let dq = q.derivative(1);
    dq.zip_with(q, |d, v| 0.5 * d * d + v * v * v)
        .expect("same grid")
        .integral()
}
