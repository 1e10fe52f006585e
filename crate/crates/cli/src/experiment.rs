//! Experiment drivers shared by the subcommands and `run`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kdv_core::cnoidal::{asymptotics_table, hk_traveling_wave};
use kdv_core::flows::{
    alpha_growth_monitor, convergence_sweep, evolve, Background, FlowKind, FlowSpec, SweepConfig,
    Trajectory,
};
use kdv_core::io::{fmt_g17, read_field, write_field, write_ledger, write_trajectory, Provenance, TableWriter};
use kdv_core::sampling::{smooth_random_field, SmoothFieldSpec};
use kdv_core::schrodinger::{diagonal_green, diagonal_green_nullspace, GreenMethod};
use kdv_core::{CnoidalWeierstrass, Field, Lattice, PeriodicGrid};

use crate::config::{ExperimentConfig, InitSpec, Preset};
use crate::verify;
use crate::{CliError, CliResult};

/// Provenance every output of `config` carries.
pub fn provenance(config: &ExperimentConfig) -> Provenance {
    Provenance::new(&config.hash(), config.seed).with("name", &config.name)
}

/// `path` if absolute, else `path` under the output directory.
pub fn resolve(config: &ExperimentConfig, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        config.out_dir.join(path)
    }
}

/// Creates `path` and its parent directories.
pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn wave(config: &ExperimentConfig) -> CliResult<CnoidalWeierstrass> {
    Ok(CnoidalWeierstrass::from_half_periods(config.grid.omega1, config.grid.omega3)?)
}

/// Seeded smooth field with sup norm `amplitude`; the generator starts fresh from the seed.
pub fn random_field(config: &ExperimentConfig, grid: &PeriodicGrid, amplitude: f64) -> CliResult<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let spec = SmoothFieldSpec::new(4, 2.0, amplitude);
    Ok(smooth_random_field(grid, spec, &mut rng)?)
}

/// Initial state of `evolve`. The cnoidal preset uses the lattice period; the random preset
/// uses `grid.period`.
pub fn initial_state(config: &ExperimentConfig) -> CliResult<Field> {
    match &config.flow.init {
        InitSpec::Cnoidal => {
            let w = wave(config)?;
            Ok(w.field(&w.grid(config.grid.n)?, 0.0)?)
        }
        InitSpec::Random => {
            let grid = PeriodicGrid::new(config.grid.period, config.grid.n)?;
            random_field(config, &grid, config.flow.amplitude)
        }
        InitSpec::File(path) => {
            let file = File::open(path).map_err(|e| {
                CliError::Usage(format!("cannot read initial state {}: {e}", path.display()))
            })?;
            Ok(read_field(file, None)?)
        }
    }
}

fn background(config: &ExperimentConfig, grid: &PeriodicGrid) -> CliResult<Background> {
    let flow = &config.flow;
    if !flow.kind.uses_background() || !flow.cnoidal_background {
        return Ok(Background::Zero);
    }
    let w = wave(config)?;
    if (grid.period() - w.period()).abs() > 1e-12 * w.period() {
        return Err(CliError::Usage(format!(
            "the cnoidal background has period {}, the state {}",
            fmt_g17(w.period()),
            fmt_g17(grid.period())
        )));
    }
    match flow.kind {
        FlowKind::HkTilde => {
            let kappa = flow.kappa.expect("validated in config");
            Ok(Background::cnoidal_hk(&hk_traveling_wave(&w.lat, kappa)?, grid)?)
        }
        _ => Ok(Background::cnoidal_kdv(&w, grid)?),
    }
}

pub fn run_evolve(config: &ExperimentConfig) -> CliResult<Trajectory> {
    let q0 = initial_state(config)?;
    let flow = &config.flow;
    let mut spec = FlowSpec::new(flow.kind, flow.dt, flow.t_final)
        .stepper(flow.stepper)
        .dealias(flow.dealias)
        .record_every(flow.record_every)
        .probe_kappas(config.probe_kappas.clone())
        .background(background(config, q0.grid())?);
    if let Some(k) = flow.kappa {
        spec = spec.kappa(k);
    }
    Ok(evolve(&spec, &q0)?)
}

/// Writes the trajectory and ledger of an `evolve` run.
pub fn write_evolve(config: &ExperimentConfig, traj: &Trajectory, traj_path: &Path, ledger_path: &Path) -> CliResult<()> {
    let meta = provenance(config)
        .with("flow", config.flow.kind.name())
        .with("stepper", config.flow.stepper.name());
    let mut out = create(traj_path)?;
    write_trajectory(&mut out, traj, &meta)?;
    out.flush()?;
    let mut out = create(ledger_path)?;
    write_ledger(&mut out, &traj.ledger, &meta)?;
    out.flush()?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_g17).unwrap_or_default()
}

/// Convergence of the `H~_kappa` flows to KdV around the cnoidal background.
pub fn sweep_kappa(config: &ExperimentConfig, out: impl Write) -> CliResult<()> {
    let s = &config.sweep;
    let w = wave(config)?;
    let grid = w.grid(config.grid.n)?;
    let q0 = random_field(config, &grid, s.amplitude)?;
    let sweep = SweepConfig {
        kappas: s.kappas.clone(),
        t_final: s.t_final,
        dt: s.dt,
        stepper: config.flow.stepper,
        record_every: s.record_every,
        background: s.cnoidal_background.then_some(w),
    };
    let table = convergence_sweep(&sweep, &q0)?;
    let columns = ["kappa", "sup_diff_ref", "cauchy_next", "background_gap", "P_min", "P_max", "error"];
    let mut w = TableWriter::new(out, &provenance(config).with("experiment", "sweep-kappa"), &columns)?;
    for row in &table.rows {
        let (lo, hi) = row.momentum_range.unzip();
        w.text_row([
            row.kappa.map(fmt_g17).unwrap_or_else(|| "kdv".into()),
            opt(row.sup_diff_ref),
            opt(row.cauchy_next),
            opt(row.background_gap),
            opt(lo),
            opt(hi),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    w.finish()?;
    Ok(())
}

pub fn cnoidal_asymptotics(config: &ExperimentConfig, out: impl Write) -> CliResult<()> {
    let lat = Lattice::new(config.grid.omega1, config.grid.omega3)?;
    let table = asymptotics_table(&lat, &config.asymptotics_kappas)?;
    let meta = provenance(config).with("experiment", "cnoidal-asymptotics");
    let columns = ["kappa", "b", "nu", "c1", "c2", "b_err", "nu_err", "c1_err", "c2_err"];
    let mut w = TableWriter::new(out, &meta, &columns)?;
    for r in &table.rows {
        w.row(&[r.kappa, r.b, r.nu, r.c1, r.c2, r.b_err, r.nu_err, r.c1_err, r.c2_err])?;
    }
    w.finish()?;
    Ok(())
}

/// Gronwall ratio of `alpha(varkappa)` along `H~_kappa` around the cnoidal background.
pub fn alpha_growth(config: &ExperimentConfig, out: impl Write) -> CliResult<()> {
    let g = &config.growth;
    let w = wave(config)?;
    let grid = w.grid(config.grid.n)?;
    let q0 = random_field(config, &grid, g.amplitude)?;
    let meta = provenance(config).with("experiment", "alpha-growth");
    let mut table = TableWriter::new(out, &meta, &["kappa", "varkappa", "ratio", "note"])?;
    for &kappa in &g.kappas {
        let hk = hk_traveling_wave(&w.lat, kappa)?;
        let spec = FlowSpec::new(FlowKind::HkTilde, g.dt, g.t_final)
            .kappa(kappa)
            .stepper(config.flow.stepper)
            .background(Background::cnoidal_hk(&hk, &grid)?)
            .record_every(g.record_every);
        let ratio = alpha_growth_monitor(&evolve(&spec, &q0)?, g.varkappa)?;
        let note = match &ratio {
            kdv_core::flows::GrowthRatio::Undefined(why) => why.clone(),
            _ => String::new(),
        };
        table.text_row([fmt_g17(kappa), fmt_g17(g.varkappa), opt(ratio.value()), note])?;
    }
    table.finish()?;
    Ok(())
}

pub fn cnoidal_profile(config: &ExperimentConfig, t: f64, out: impl Write) -> CliResult<()> {
    let w = wave(config)?;
    let field = w.field(&w.grid(config.grid.n)?, t)?;
    let meta = provenance(config).with("t", fmt_g17(t));
    write_field(out, &field, &meta)?;
    Ok(())
}

pub fn hk_speed(config: &ExperimentConfig, kappa: f64, out: impl Write) -> CliResult<()> {
    let lat = Lattice::new(config.grid.omega1, config.grid.omega3)?;
    let hk = hk_traveling_wave(&lat, kappa)?;
    let meta = provenance(config).with("kappa", fmt_g17(kappa));
    let mut w = TableWriter::new(out, &meta, &["nu", "c1", "c2"])?;
    w.row(&[hk.nu, hk.c1, hk.c2])?;
    w.finish()?;
    Ok(())
}

pub fn green(config: &ExperimentConfig, input: &Path, kappa: f64, method: GreenMethod, out: impl Write) -> CliResult<()> {
    let file = File::open(input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let q = read_field(file, None)?;
    let gd = match method {
        GreenMethod::Floquet => diagonal_green(&q, kappa)?,
        GreenMethod::Nullspace => diagonal_green_nullspace(&q, kappa)?,
    };
    let meta = provenance(config)
        .with("kappa", fmt_g17(kappa))
        .with("method", method.name());
    write_field(out, &gd.g, &meta)?;
    Ok(())
}

/// `wp`, `wp'`, `zeta` and `sigma` at `z`.
pub fn elliptic_eval(config: &ExperimentConfig, z: num_complex::Complex64, out: impl Write) -> CliResult<()> {
    let lat = Lattice::new(config.grid.omega1, config.grid.omega3)?;
    let meta = provenance(config)
        .with("z", format!("{}{:+}i", fmt_g17(z.re), z.im))
        .with("g2", fmt_g17(lat.g2()))
        .with("g3", fmt_g17(lat.g3()));
    let mut w = TableWriter::new(out, &meta, &["quantity", "re", "im"])?;
    for (name, v) in [
        ("wp", lat.wp(z)?),
        ("wp_prime", lat.wp_prime(z)?),
        ("zeta", lat.zeta(z)?),
        ("sigma", lat.sigma(z)?),
    ] {
        w.text_row([name.to_string(), fmt_g17(v.re), fmt_g17(v.im)])?;
    }
    w.finish()?;
    Ok(())
}

/// Runs the verify suite and writes its report; fails if any selected check fails.
pub fn verify_report(config: &ExperimentConfig, only: &[String], out: impl Write) -> CliResult<Vec<verify::Outcome>> {
    let outcomes = verify::run(config, only)?;
    verify::write_report(out, &outcomes, &provenance(config))?;
    Ok(outcomes)
}

/// Output file name of `preset`.
pub fn preset_file(preset: Preset) -> &'static str {
    match preset {
        Preset::Verify => "verify.csv",
        Preset::Evolve => "trajectory.csv",
        Preset::SweepKappa => "sweep_kappa.csv",
        Preset::CnoidalAsymptotics => "cnoidal_asymptotics.csv",
        Preset::AlphaGrowth => "alpha_growth.csv",
    }
}
