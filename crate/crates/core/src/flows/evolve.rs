use num_complex::Complex64;

use super::stepper::Scheme;
use super::{kdv_energy, momentum, FlowSpec};
use crate::error::{Error, Result};
use crate::schrodinger::alpha;
use crate::spectral::{Field, PeriodicGrid};

/// Sup norm above which a run is declared blown up.
const BLOW_UP_SUP: f64 = 1e6;
/// Largest admissible share of `sum |c_k|^2` in the top tenth of the modes.
const BLOW_UP_TAIL: f64 = 1e-2;

/// Conserved quantities at every recorded time.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConservedLedger {
    pub times: Vec<f64>,
    /// `P = (1/2) integral of q^2`.
    pub momentum: Vec<f64>,
    /// `H = integral of (q'^2/2 + q^3)`.
    pub energy: Vec<f64>,
    pub probe_kappas: Vec<f64>,
    /// `alpha[i][j]` is `alpha(probe_kappas[i], q(times[j]))`.
    pub alpha: Vec<Vec<f64>>,
}

fn relative_drift(series: &[f64]) -> f64 {
    let Some(&first) = series.first() else {
        return 0.0;
    };
    let worst = series.iter().fold(0.0f64, |m, v| m.max((v - first).abs()));
    worst / first.abs().max(f64::MIN_POSITIVE)
}

impl ConservedLedger {
    pub fn new(probe_kappas: Vec<f64>) -> Self {
        Self {
            alpha: vec![Vec::new(); probe_kappas.len()],
            probe_kappas,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn record(&mut self, t: f64, q: &Field) -> Result<()> {
        let mut alphas = Vec::with_capacity(self.probe_kappas.len());
        for &k in &self.probe_kappas {
            alphas.push(alpha(q, k)?.value);
        }
        let (p, h) = (momentum(q), kdv_energy(q));
        if !(p.is_finite() && h.is_finite() && alphas.iter().all(|a| a.is_finite())) {
            return Err(Error::Consistency(format!("non-finite ledger entry at t = {t}")));
        }
        self.times.push(t);
        self.momentum.push(p);
        self.energy.push(h);
        for (col, a) in self.alpha.iter_mut().zip(alphas) {
            col.push(a);
        }
        Ok(())
    }

    /// `max_t |P(t) - P(0)| / |P(0)|`.
    pub fn momentum_drift(&self) -> f64 {
        relative_drift(&self.momentum)
    }

    pub fn energy_drift(&self) -> f64 {
        relative_drift(&self.energy)
    }

    pub fn alpha_drift(&self, probe: usize) -> f64 {
        relative_drift(&self.alpha[probe])
    }
}

/// Recorded states of one run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Field>,
    pub ledger: ConservedLedger,
}

impl Trajectory {
    pub fn grid(&self) -> &PeriodicGrid {
        self.states[0].grid()
    }

    pub fn final_state(&self) -> &Field {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial time")
    }
}

fn check_blow_up(t: f64, spectrum: Vec<Complex64>, grid: &PeriodicGrid) -> Result<Field> {
    let q = Field::from_spectrum(grid, spectrum).map_err(|_| Error::BlowUp {
        time: t,
        reason: "non-finite state".into(),
    })?;
    let sup = q.sup_norm();
    if !sup.is_finite() {
        return Err(Error::BlowUp {
            time: t,
            reason: "non-finite state".into(),
        });
    }
    if sup > BLOW_UP_SUP {
        return Err(Error::BlowUp {
            time: t,
            reason: format!("sup norm {sup:e} exceeds {BLOW_UP_SUP:e}"),
        });
    }
    let cutoff = (0.9 * (grid.n() / 2) as f64).floor() as usize;
    let tail = q.tail_fraction(cutoff);
    if tail > BLOW_UP_TAIL {
        return Err(Error::BlowUp {
            time: t,
            reason: format!("top-decade spectral share {tail:e} exceeds {BLOW_UP_TAIL:e}"),
        });
    }
    Ok(q)
}

/// Fixed-step integration of `spec` from `q0` to `spec.t_final`.
pub fn evolve(spec: &FlowSpec, q0: &Field) -> Result<Trajectory> {
    spec.validate(q0)?;
    let grid = q0.grid().clone();
    let steps = (spec.t_final.abs() / spec.dt).round() as usize;
    let h = if steps == 0 { 0.0 } else { spec.t_final / steps as f64 };
    if steps > 0 && (h.abs() - spec.dt).abs() > 1e-9 * spec.dt {
        return Err(Error::Parameter(format!(
            "t_final = {} is not a multiple of dt = {}",
            spec.t_final, spec.dt
        )));
    }
    if steps == 0 && spec.t_final != 0.0 {
        return Err(Error::Parameter(format!(
            "|t_final| = {} is below half a step",
            spec.t_final.abs()
        )));
    }

    let symbol = spec.linear_symbol(&grid);
    // Modes above the two-thirds cutoff evolve under the linear part alone.
    let cut = grid.dealias_cutoff() as isize;
    let keep: Vec<bool> = (0..grid.n())
        .map(|k| !spec.dealias || grid.signed_index(k).abs() <= cut)
        .collect();
    let scheme = Scheme::new(spec.stepper, &symbol, h);
    let nonlinear = |u: &[Complex64], t: f64| -> Result<Vec<Complex64>> {
        let q = Field::from_spectrum(&grid, u.to_vec()).map_err(|_| Error::BlowUp {
            time: t,
            reason: "non-finite stage state".into(),
        })?;
        let r = spec.rhs(&q, t).map_err(|e| Error::Flow {
            time: t,
            source: Box::new(e),
        })?;
        Ok(r
            .spectrum()
            .iter()
            .zip(u)
            .zip(&symbol)
            .zip(&keep)
            .map(|(((r, u), m), &k)| if k { r - m * u } else { Complex64::new(0.0, 0.0) })
            .collect())
    };

    let mut ledger = ConservedLedger::new(spec.probe_kappas.clone());
    ledger.record(0.0, q0)?;
    let mut times = vec![0.0];
    let mut states = vec![q0.clone()];
    let mut u = q0.spectrum().to_vec();
    for k in 0..steps {
        let t = k as f64 * h;
        u = scheme.step(&u, t, h, &nonlinear)?;
        let t_next = (k + 1) as f64 * h;
        let q = check_blow_up(t_next, u.clone(), &grid)?;
        u = q.spectrum().to_vec();
        if (k + 1) % spec.record_every == 0 || k + 1 == steps {
            ledger.record(t_next, &q).map_err(|e| Error::Flow {
                time: t_next,
                source: Box::new(e),
            })?;
            times.push(t_next);
            states.push(q);
        }
    }
    Ok(Trajectory {
        times,
        states,
        ledger,
    })
}
