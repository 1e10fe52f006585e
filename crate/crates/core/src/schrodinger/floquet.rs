//! Monodromy and Floquet solutions of `-psi'' + q psi = -kappa^2 psi`.
//!
//! All growing quantities are carried as a mantissa plus an accumulated log scale.
//! The solution decaying to the right is obtained by integrating the reflected
//! potential `q(-x)` forward, so both Floquet solutions are computed in their
//! growing direction.

use crate::error::{Error, Result};
use crate::ode::{dop853_step, C, STAGES};
use crate::spectral::{Field, PeriodicGrid};

/// Integration resolution for the Hill equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HillOptions {
    /// Fixed steps per grid cell; a power of two.
    pub substeps: usize,
}

impl HillOptions {
    /// Step `period / (8 max(n, kappa period))`, rounded so steps align with nodes.
    pub fn for_problem(grid: &PeriodicGrid, kappa: f64) -> Self {
        let ratio = (kappa * grid.period() / grid.n() as f64).ceil().max(1.0) as usize;
        Self {
            substeps: 8 * ratio.next_power_of_two(),
        }
    }

    pub fn with_substeps(substeps: usize) -> Self {
        Self { substeps }
    }
}

/// Values of `q` at every stage abscissa of every step, in step order.
struct StageTable {
    h: f64,
    values: Vec<[f64; STAGES]>,
}

impl StageTable {
    /// `sign = 1` samples `q(x)`, `sign = -1` samples the reflection `q(-x)`.
    fn new(q: &Field, substeps: usize, sign: f64) -> Result<Self> {
        let grid = q.grid();
        let steps = grid.n() * substeps;
        let fine = PeriodicGrid::new(grid.period(), steps)?;
        let h = fine.dx();
        let mut values = vec![[0.0; STAGES]; steps];
        for (i, &c) in C.iter().enumerate().take(STAGES - 1) {
            let shifted = q.shifted(sign * c * h).resampled(&fine)?;
            let s = shifted.samples();
            for (t, row) in values.iter_mut().enumerate() {
                let idx = if sign > 0.0 { t } else { (steps - t) % steps };
                row[i] = s[idx];
            }
        }
        // The last abscissa is 1: the start of the next step.
        for t in 0..steps {
            values[t][STAGES - 1] = values[(t + 1) % steps][0];
        }
        Ok(Self { h, values })
    }
}

/// Column states with a shared log scale, recorded at every node `0..=n`.
struct Track<const N: usize> {
    states: Vec<[f64; N]>,
    log_scale: Vec<f64>,
}

fn integrate<const N: usize>(
    table: &StageTable,
    kappa2: f64,
    substeps: usize,
    init: [f64; N],
) -> Result<Track<N>> {
    let steps = table.values.len();
    let nodes = steps / substeps;
    let mut states = Vec::with_capacity(nodes + 1);
    let mut log_scale = Vec::with_capacity(nodes + 1);
    let mut y = init;
    let mut s = 0.0;
    states.push(y);
    log_scale.push(s);
    for (t, row) in table.values.iter().enumerate() {
        y = dop853_step(table.h, &y, |i, z| {
            let a = row[i] + kappa2;
            let mut d = [0.0; N];
            for c in (0..N).step_by(2) {
                d[c] = z[c + 1];
                d[c + 1] = a * z[c];
            }
            d
        });
        let norm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Consistency(format!(
                "Hill integration produced non-finite state at step {t}"
            )));
        }
        for v in &mut y {
            *v /= norm;
        }
        s += norm.ln();
        if (t + 1) % substeps == 0 {
            states.push(y);
            log_scale.push(s);
        }
    }
    Ok(Track { states, log_scale })
}

/// Transfer matrix over one period, stored as `e^{log_scale} * scaled`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monodromy {
    /// `[[a, b], [c, d]]` acting on `(psi, psi')`.
    pub scaled: [[f64; 2]; 2],
    pub log_scale: f64,
}

impl Monodromy {
    /// The matrix itself; entries overflow to infinity once `log_scale` exceeds ~709.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let f = self.log_scale.exp();
        self.scaled.map(|row| row.map(|v| v * f))
    }

    pub fn trace(&self) -> f64 {
        (self.scaled[0][0] + self.scaled[1][1]) * self.log_scale.exp()
    }

    /// `ln |tr M|`, finite when the trace itself overflows.
    pub fn log_abs_trace(&self) -> f64 {
        (self.scaled[0][0] + self.scaled[1][1]).abs().ln() + self.log_scale
    }

    pub fn determinant(&self) -> f64 {
        let [[a, b], [c, d]] = self.scaled;
        (a * d - b * c) * (2.0 * self.log_scale).exp()
    }

    /// `|ad - bc - 1| / max(1, |ad| + |bc|)`: the Wronskian drift relative to the
    /// cancellation the determinant suffers.
    pub fn determinant_defect(&self) -> f64 {
        let [[a, b], [c, d]] = self.scaled;
        let unit = (-2.0 * self.log_scale).exp();
        (a * d - b * c - unit).abs() / unit.max((a * d).abs() + (b * c).abs())
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.log_abs_trace() > std::f64::consts::LN_2
    }
}

/// Floquet solutions normalized so `psi_+ psi_-' - psi_+' psi_- = 1`, stored as
/// logarithms `ln psi` and logarithmic derivatives `psi' / psi` at the nodes.
#[derive(Clone, Debug)]
pub struct FloquetPair {
    grid: PeriodicGrid,
    pub kappa: f64,
    pub log_psi_plus: Vec<f64>,
    pub log_psi_minus: Vec<f64>,
    pub dlog_psi_plus: Vec<f64>,
    pub dlog_psi_minus: Vec<f64>,
    /// `ln rho`, where `psi_+(x + period) = rho psi_+(x)` and `0 < rho < 1`.
    pub log_multiplier: f64,
    /// Wronskian of the raw solutions before normalization.
    pub raw_wronskian: f64,
    /// `max_j |W(x_j) - 1|` for the normalized pair.
    pub wronskian_defect: f64,
    /// Mismatch between the multiplier read off the reflected integration and `rho`.
    pub bloch_defect: f64,
    pub monodromy: Monodromy,
}

impl FloquetPair {
    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn multiplier(&self) -> f64 {
        self.log_multiplier.exp()
    }

    pub fn wronskian(&self) -> f64 {
        1.0
    }

    /// `psi_+` at the nodes; fails if the values do not fit in an `f64`.
    pub fn psi_plus(&self) -> Result<Field> {
        exp_field(&self.grid, &self.log_psi_plus)
    }

    pub fn psi_minus(&self) -> Result<Field> {
        exp_field(&self.grid, &self.log_psi_minus)
    }

    /// `g = psi_+ psi_-`.
    pub fn product(&self) -> Result<Field> {
        let s = self
            .log_psi_plus
            .iter()
            .zip(&self.log_psi_minus)
            .map(|(a, b)| (a + b).exp())
            .collect();
        Field::from_samples(&self.grid, s)
    }
}

fn exp_field(grid: &PeriodicGrid, logs: &[f64]) -> Result<Field> {
    let s: Vec<f64> = logs.iter().map(|v| v.exp()).collect();
    if s.iter().any(|v| !v.is_finite() || *v == 0.0) {
        return Err(Error::Domain(
            "Floquet solution leaves the f64 range; use the logarithmic form".into(),
        ));
    }
    Field::from_samples(grid, s)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::Parameter(format!("kappa must be positive, got {kappa}")));
    }
    Ok(())
}

pub fn monodromy(q: &Field, kappa: f64) -> Result<Monodromy> {
    monodromy_with(q, kappa, HillOptions::for_problem(q.grid(), kappa))
}

pub fn monodromy_with(q: &Field, kappa: f64, opts: HillOptions) -> Result<Monodromy> {
    check_kappa(kappa)?;
    let table = StageTable::new(q, opts.substeps, 1.0)?;
    let track = integrate(&table, kappa * kappa, opts.substeps, [1.0, 0.0, 0.0, 1.0])?;
    Ok(monodromy_from_track(&track))
}

fn monodromy_from_track(track: &Track<4>) -> Monodromy {
    let y = track.states.last().expect("at least one node");
    Monodromy {
        scaled: [[y[0], y[2]], [y[1], y[3]]],
        log_scale: *track.log_scale.last().expect("at least one node"),
    }
}

/// Unit eigenvector of `[[a, b], [c, d]]` for eigenvalue `lambda`, with positive first entry.
fn eigenvector(m: [[f64; 2]; 2], lambda: f64) -> Result<[f64; 2]> {
    let [[a, b], [c, d]] = m;
    let r1 = [b, lambda - a];
    let r2 = [lambda - d, c];
    let n1 = r1[0].hypot(r1[1]);
    let n2 = r2[0].hypot(r2[1]);
    let (v, n) = if n1 >= n2 { (r1, n1) } else { (r2, n2) };
    if n == 0.0 {
        return Err(Error::Consistency("degenerate monodromy eigenvector".into()));
    }
    let v = [v[0] / n, v[1] / n];
    if v[0] == 0.0 {
        return Err(Error::Consistency("Floquet solution vanishes at the origin".into()));
    }
    Ok(if v[0] < 0.0 { [-v[0], -v[1]] } else { v })
}

pub fn floquet_pair(q: &Field, kappa: f64) -> Result<FloquetPair> {
    floquet_pair_with(q, kappa, HillOptions::for_problem(q.grid(), kappa))
}

pub fn floquet_pair_with(q: &Field, kappa: f64, opts: HillOptions) -> Result<FloquetPair> {
    check_kappa(kappa)?;
    let grid = q.grid().clone();
    let n = grid.n();
    let kappa2 = kappa * kappa;
    let table = StageTable::new(q, opts.substeps, 1.0)?;
    let track = integrate(&table, kappa2, opts.substeps, [1.0, 0.0, 0.0, 1.0])?;
    let mono = monodromy_from_track(&track);

    if !mono.is_hyperbolic() {
        return Err(Error::SpectralBand {
            energy: -kappa2,
            trace: mono.trace(),
        });
    }
    let m = mono.scaled;
    let t = m[0][0] + m[1][1];
    if t < 0.0 {
        return Err(Error::Consistency(format!(
            "monodromy trace {} is below -2: -kappa^2 lies above the ground state",
            mono.trace()
        )));
    }
    let unit_det = (-2.0 * mono.log_scale).exp();
    let big = 0.5 * (t + (t * t - 4.0 * unit_det).max(0.0).sqrt());
    let small = unit_det / big;
    let log_growth = mono.log_scale + big.ln();
    let v_minus = eigenvector(m, big)?;
    let v_plus = eigenvector(m, small)?;

    // psi_+ (x) = phi(-x) with phi solving the reflected problem and growing forward.
    let reflected = StageTable::new(q, opts.substeps, -1.0)?;
    let phi = integrate(&reflected, kappa2, opts.substeps, [v_plus[0], -v_plus[1]])?;
    let log_rho = -log_growth;
    // Unfold psi_+ with the reflected run's own growth so that it is exactly Bloch across x = 0.
    let [p_end, _] = phi.states[n];
    let phi_growth = phi.log_scale[n] + p_end.ln() - v_plus[0].ln();

    let mut log_plus = vec![0.0; n];
    let mut dlog_plus = vec![0.0; n];
    let mut log_minus = vec![0.0; n];
    let mut dlog_minus = vec![0.0; n];
    for j in 0..n {
        let y = track.states[j];
        let psi = y[0] * v_minus[0] + y[2] * v_minus[1];
        let dpsi = y[1] * v_minus[0] + y[3] * v_minus[1];
        if psi <= 0.0 {
            return Err(Error::Consistency(format!("psi_- changes sign near node {j}")));
        }
        log_minus[j] = track.log_scale[j] + psi.ln();
        dlog_minus[j] = dpsi / psi;

        let (k, shift) = if j == 0 { (0, 0.0) } else { (n - j, -phi_growth) };
        let [p, dp] = phi.states[k];
        if p <= 0.0 {
            return Err(Error::Consistency(format!("psi_+ changes sign near node {j}")));
        }
        log_plus[j] = shift + phi.log_scale[k] + p.ln();
        dlog_plus[j] = -dp / p;
    }

    // Reflected growth over one period must reproduce 1/rho.
    let bloch_defect = (phi_growth - log_growth).abs();

    let raw_wronskian = v_plus[0] * v_minus[1] - v_plus[1] * v_minus[0];
    if raw_wronskian <= 0.0 {
        return Err(Error::Consistency(format!(
            "Floquet Wronskian {raw_wronskian} is not positive"
        )));
    }
    // Split the normalization so psi_+ = psi_- at the middle node.
    let mid = n / 2;
    let log_w = raw_wronskian.ln();
    let shift_plus = 0.5 * (log_minus[mid] - log_plus[mid] - log_w);
    let shift_minus = 0.5 * (log_plus[mid] - log_minus[mid] - log_w);
    for v in &mut log_plus {
        *v += shift_plus;
    }
    for v in &mut log_minus {
        *v += shift_minus;
    }
    let wronskian_defect = (0..n)
        .map(|j| ((log_plus[j] + log_minus[j]).exp() * (dlog_minus[j] - dlog_plus[j]) - 1.0).abs())
        .fold(0.0, f64::max);

    Ok(FloquetPair {
        grid,
        kappa,
        log_psi_plus: log_plus,
        log_psi_minus: log_minus,
        dlog_psi_plus: dlog_plus,
        dlog_psi_minus: dlog_minus,
        log_multiplier: log_rho,
        raw_wronskian,
        wronskian_defect,
        bloch_defect,
        monodromy: mono,
    })
}
