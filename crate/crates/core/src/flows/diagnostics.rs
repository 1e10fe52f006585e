use rayon::prelude::*;

use super::{evolve, Background, FlowKind, FlowSpec, Stepper, Trajectory};
use crate::cnoidal::{hk_traveling_wave, CnoidalWeierstrass};
use crate::error::{Error, Result};
use crate::schrodinger::alpha;
use crate::spectral::{h_minus_one_norm, Field};

fn hk_final(kappa: f64, time: f64, q: &Field, dt: f64, stepper: Stepper) -> Result<Field> {
    if time == 0.0 {
        return Ok(q.clone());
    }
    let spec = FlowSpec::new(FlowKind::Hk, dt, time)
        .kappa(kappa)
        .stepper(stepper)
        .record_every(usize::MAX);
    Ok(evolve(&spec, q)?.final_state().clone())
}

/// `|| Phi_kappa(t) Phi_varkappa(s) q0 - Phi_varkappa(s) Phi_kappa(t) q0 ||_{H^-1}` for the
/// `H_kappa` flows; zero in the continuum.
pub fn commute_check(
    kappa: f64,
    varkappa: f64,
    q0: &Field,
    t: f64,
    s: f64,
    dt: f64,
    stepper: Stepper,
) -> Result<f64> {
    let (a, b) = rayon::join(
        || hk_final(kappa, t, &hk_final(varkappa, s, q0, dt, stepper)?, dt, stepper),
        || hk_final(varkappa, s, &hk_final(kappa, t, q0, dt, stepper)?, dt, stepper),
    );
    Ok(h_minus_one_norm(&a?.sub(&b?)?))
}

/// Parameters shared by every row of a convergence sweep.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub kappas: Vec<f64>,
    pub t_final: f64,
    pub dt: f64,
    pub stepper: Stepper,
    pub record_every: usize,
    /// Cnoidal background; without one the state is the full wave and the flows are `H_kappa` and KdV.
    pub background: Option<CnoidalWeierstrass>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    /// `None` marks the reference row (`kappa = infinity`).
    pub kappa: Option<f64>,
    pub error: Option<String>,
    /// `sup_t || q_kappa(t) - q_ref(t) ||_{H^-1}`.
    pub sup_diff_ref: Option<f64>,
    /// `sup_t || q_next(t) - q_kappa(t) ||_{H^-1}` against the next successful row.
    pub cauchy_next: Option<f64>,
    /// `(1/2) integral of (V_kappa - V)^2` at `t_final`.
    pub background_gap: Option<f64>,
    /// Extremes of `P(t)` along the run.
    pub momentum_range: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    /// Rows in increasing `kappa`, the reference row last.
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Consecutive `cauchy_next` values, stopping at the first gap.
    pub fn cauchy_sequence(&self) -> Vec<f64> {
        self.rows.iter().map_while(|r| r.cauchy_next).collect()
    }

    pub fn background_gaps(&self) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.kappa.is_some())
            .map_while(|r| r.background_gap)
            .collect()
    }
}

fn sup_h_minus_one(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.times.len() != b.times.len() {
        return Err(Error::Consistency("trajectories record different times".into()));
    }
    let mut worst = 0.0f64;
    for (x, y) in a.states.iter().zip(&b.states) {
        worst = worst.max(h_minus_one_norm(&x.sub(y)?));
    }
    Ok(worst)
}

fn momentum_range(traj: &Trajectory) -> (f64, f64) {
    let p = &traj.ledger.momentum;
    (
        p.iter().copied().fold(f64::INFINITY, f64::min),
        p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Runs the `kappa` rows (concurrently) and the KdV reference from `q0`.
///
/// With a background, rows evolve `H~_kappa` around `V(0, x + nu t)` and the reference is KdV
/// with potential `V(0, x + 6 e1 t)`. A failed row is reported and the sweep continues.
pub fn convergence_sweep(config: &SweepConfig, q0: &Field) -> Result<SweepTable> {
    if config.kappas.is_empty() {
        return Err(Error::InvalidInput("empty kappa list".into()));
    }
    if config.kappas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("kappa values must increase".into()));
    }
    let grid = q0.grid();
    let base = |kind: FlowKind| {
        FlowSpec::new(kind, config.dt, config.t_final)
            .stepper(config.stepper)
            .record_every(config.record_every)
    };
    let reference_spec = match &config.background {
        Some(wave) => base(FlowKind::KdvWithPotential).background(Background::cnoidal_kdv(wave, grid)?),
        None => base(FlowKind::Kdv),
    };
    let run_row = |kappa: f64| -> Result<(Trajectory, Option<f64>)> {
        match &config.background {
            Some(wave) => {
                let hk = hk_traveling_wave(&wave.lat, kappa)?;
                let spec = base(FlowKind::HkTilde)
                    .kappa(kappa)
                    .background(Background::cnoidal_hk(&hk, grid)?);
                let traj = evolve(&spec, q0)?;
                let v_kappa = wave.translate(grid, hk.nu * config.t_final)?;
                let v = wave.translate(grid, wave.kdv_speed() * config.t_final)?;
                let d = v_kappa.sub(&v)?;
                Ok((traj, Some(0.5 * d.inner(&d)?)))
            }
            None => Ok((evolve(&base(FlowKind::Hk).kappa(kappa), q0)?, None)),
        }
    };

    let (reference, runs) = rayon::join(
        || evolve(&reference_spec, q0),
        || config.kappas.par_iter().map(|&k| run_row(k)).collect::<Vec<_>>(),
    );
    let reference = reference?;

    let mut rows = Vec::with_capacity(runs.len() + 1);
    for (i, run) in runs.iter().enumerate() {
        let kappa = Some(config.kappas[i]);
        let row = match run {
            Ok((traj, gap)) => {
                let next = runs[i + 1..].iter().find_map(|r| r.as_ref().ok());
                SweepRow {
                    kappa,
                    error: None,
                    sup_diff_ref: Some(sup_h_minus_one(traj, &reference)?),
                    cauchy_next: next.map(|(n, _)| sup_h_minus_one(n, traj)).transpose()?,
                    background_gap: *gap,
                    momentum_range: Some(momentum_range(traj)),
                }
            }
            Err(e) => SweepRow {
                kappa,
                error: Some(e.to_string()),
                sup_diff_ref: None,
                cauchy_next: None,
                background_gap: None,
                momentum_range: None,
            },
        };
        rows.push(row);
    }
    rows.push(SweepRow {
        kappa: None,
        error: None,
        sup_diff_ref: Some(sup_h_minus_one(&reference, &reference)?),
        cauchy_next: None,
        background_gap: config.background.as_ref().map(|_| 0.0),
        momentum_range: Some(momentum_range(&reference)),
    });
    Ok(SweepTable { rows })
}

/// Outcome of [`alpha_growth_monitor`].
#[derive(Clone, Debug, PartialEq)]
pub enum GrowthRatio {
    /// `max_t |ln alpha(q(t)) - ln alpha(q(0))| / |t|`.
    Finite(f64),
    /// The ratio is undefined, e.g. for a zero initial perturbation.
    Undefined(String),
}

impl GrowthRatio {
    pub fn value(&self) -> Option<f64> {
        match self {
            GrowthRatio::Finite(v) => Some(*v),
            GrowthRatio::Undefined(_) => None,
        }
    }
}

/// Numerical Gronwall constant of `alpha(varkappa, q(t))` along a trajectory.
pub fn alpha_growth_monitor(traj: &Trajectory, varkappa: f64) -> Result<GrowthRatio> {
    let q0 = &traj.states[0];
    if q0.sup_norm() == 0.0 {
        return Ok(GrowthRatio::Undefined("zero initial perturbation".into()));
    }
    let a0 = alpha(q0, varkappa)?.value;
    if !(a0 > 0.0) {
        return Ok(GrowthRatio::Undefined(format!("alpha(q(0)) = {a0:e} is not positive")));
    }
    let values: Vec<f64> = traj.states[1..]
        .par_iter()
        .map(|q| alpha(q, varkappa).map(|a| a.value))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for (a, &t) in values.iter().zip(&traj.times[1..]) {
        if !(*a > 0.0) {
            return Ok(GrowthRatio::Undefined(format!("alpha = {a:e} at t = {t} is not positive")));
        }
        if t != 0.0 {
            worst = worst.max((a.ln() - a0.ln()).abs() / t.abs());
        }
    }
    Ok(GrowthRatio::Finite(worst))
}
