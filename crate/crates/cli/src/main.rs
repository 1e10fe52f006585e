use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use kdv_core::schrodinger::GreenMethod;
use kdvlab::config::{parse_kappas, ConfigBuilder, ExperimentConfig, Preset};
use kdvlab::experiment::{self, create, resolve};
use kdvlab::verify::{self, Status};
use kdvlab::{exit, CliError, CliResult};

/// Numerical experiments for KdV, the H_kappa flows and their cnoidal waves.
///
/// Settings come from defaults, then `--config`, then `--set`, then the subcommand flags.
/// Relative output paths are placed under `--out`; `-` writes to stdout.
#[derive(Parser, Debug)]
#[command(name = "kdvlab", version)]
struct Cli {
    /// Flat `key=value` configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Extra `key=value` setting; may repeat.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the invariant checks and write a report.
    Verify {
        /// Run only this check; may repeat. The others are reported as skipped.
        #[arg(long)]
        only: Vec<String>,
        #[arg(long, default_value = "verify.csv")]
        report: PathBuf,
    },
    /// Integrate one flow and write the trajectory and the conserved-quantity ledger.
    Evolve(EvolveArgs),
    /// Convergence of the H~_kappa flows to KdV as kappa grows.
    SweepKappa {
        #[arg(long)]
        kappas: Option<String>,
        #[arg(long)]
        t_final: Option<String>,
        #[arg(long)]
        dt: Option<String>,
        #[arg(long, default_value = "sweep_kappa.csv")]
        out: PathBuf,
    },
    #[command(subcommand)]
    Cnoidal(CnoidalCommand),
    #[command(subcommand)]
    Schrodinger(SchrodingerCommand),
    #[command(subcommand)]
    Elliptic(EllipticCommand),
    /// Run the experiment named by the `preset` setting.
    Run {
        #[arg(long)]
        preset: Option<String>,
        /// Output file; defaults to a name derived from the preset.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct EvolveArgs {
    /// kdv, kdv-potential, hk or hk-tilde.
    #[arg(long)]
    flow: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    t_final: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    stepper: Option<String>,
    /// preset:cnoidal, preset:random or file:PATH.
    #[arg(long)]
    init: Option<String>,
    /// Comma-separated energies at which the ledger tracks alpha.
    #[arg(long)]
    probe_kappas: Option<String>,
    #[arg(long)]
    record_every: Option<String>,
    #[arg(long, default_value = "trajectory.csv")]
    out: PathBuf,
    #[arg(long, default_value = "ledger.csv")]
    ledger: PathBuf,
}

#[derive(Subcommand, Debug)]
enum CnoidalCommand {
    /// Sample the cnoidal wave over one period.
    Profile {
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        n: Option<String>,
        #[arg(long, default_value = "cnoidal_profile.csv")]
        out: PathBuf,
    },
    /// Print the speed and Green's-function coefficients of the H_kappa traveling wave.
    HkSpeed {
        #[arg(long)]
        kappa: f64,
    },
    /// Large-kappa remainders of the traveling-wave parameters.
    Asymptotics {
        #[arg(long)]
        kappas: Option<String>,
        #[arg(long, default_value = "cnoidal_asymptotics.csv")]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum SchrodingerCommand {
    /// Diagonal Green's function of a sampled potential given as an `x,value` table.
    Green {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value = "floquet")]
        method: String,
        #[arg(long, default_value = "green.csv")]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum EllipticCommand {
    /// Print wp, wp', zeta and sigma at a complex point.
    Eval {
        #[arg(long)]
        omega1: Option<String>,
        /// Imaginary part of the second half-period.
        #[arg(long)]
        omega3: Option<String>,
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(exit::USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kdvlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn overrides(mut b: ConfigBuilder, pairs: &[(&str, &Option<String>)]) -> CliResult<ConfigBuilder> {
    for (key, value) in pairs {
        if let Some(v) = value {
            b = b.set(key, v)?;
        }
    }
    Ok(b)
}

fn builder(cli: &Cli) -> CliResult<ConfigBuilder> {
    let mut b = ConfigBuilder::new();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        b = b.parse_text(&text)?;
    }
    for pair in &cli.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {pair:?}")))?;
        b = b.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = cli.seed {
        b = b.set("seed", &seed.to_string())?;
    }
    if let Some(out) = &cli.out {
        b = b.set("out", &out.to_string_lossy())?;
    }
    Ok(b)
}

/// Opens `path` under the output directory, or stdout for `-`.
fn output(config: &ExperimentConfig, path: &Path) -> CliResult<Box<dyn Write>> {
    if path == Path::new("-") {
        Ok(Box::new(std::io::stdout().lock()))
    } else {
        Ok(Box::new(create(&resolve(config, path))?))
    }
}

fn nonempty_kappas(s: &Option<String>, flag: &str) -> CliResult<()> {
    match s {
        Some(s) if parse_kappas(s).map_err(CliError::Usage)?.is_empty() => {
            Err(CliError::Usage(format!("{flag} must list at least one kappa")))
        }
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let b = builder(&cli)?;
    match &cli.command {
        Command::Verify { only, report } => {
            let config = b.build()?;
            verify_command(&config, only, report)
        }
        Command::Evolve(a) => {
            let config = overrides(
                b,
                &[
                    ("flow.kind", &a.flow),
                    ("flow.kappa", &a.kappa),
                    ("flow.t_final", &a.t_final),
                    ("flow.dt", &a.dt),
                    ("grid.n", &a.n),
                    ("flow.stepper", &a.stepper),
                    ("flow.init", &a.init),
                    ("probe.kappas", &a.probe_kappas),
                    ("flow.record_every", &a.record_every),
                ],
            )?
            .build()?;
            let traj = experiment::run_evolve(&config)?;
            experiment::write_evolve(&config, &traj, &resolve(&config, &a.out), &resolve(&config, &a.ledger))
        }
        Command::SweepKappa { kappas, t_final, dt, out } => {
            nonempty_kappas(kappas, "--kappas")?;
            let config = overrides(
                b,
                &[("sweep.kappas", kappas), ("sweep.t_final", t_final), ("sweep.dt", dt)],
            )?
            .build()?;
            let w = output(&config, out)?;
            experiment::sweep_kappa(&config, w)
        }
        Command::Cnoidal(CnoidalCommand::Profile { t, n, out }) => {
            let config = overrides(b, &[("grid.n", n)])?.build()?;
            experiment::cnoidal_profile(&config, *t, output(&config, out)?)
        }
        Command::Cnoidal(CnoidalCommand::HkSpeed { kappa }) => {
            let config = b.build()?;
            experiment::hk_speed(&config, *kappa, std::io::stdout().lock())
        }
        Command::Cnoidal(CnoidalCommand::Asymptotics { kappas, out }) => {
            nonempty_kappas(kappas, "--kappas")?;
            let config = overrides(b, &[("asymptotics.kappas", kappas)])?.build()?;
            experiment::cnoidal_asymptotics(&config, output(&config, out)?)
        }
        Command::Schrodinger(SchrodingerCommand::Green { input, kappa, method, out }) => {
            let config = b.build()?;
            let method: GreenMethod = method.parse().map_err(|e: kdv_core::Error| CliError::Usage(e.to_string()))?;
            if !(kappa.is_finite() && *kappa > 0.0) {
                return Err(CliError::Usage("--kappa must be positive".into()));
            }
            let w = output(&config, out)?;
            experiment::green(&config, input, *kappa, method, w)
        }
        Command::Elliptic(EllipticCommand::Eval { omega1, omega3, z }) => {
            let config = overrides(b, &[("grid.omega1", omega1), ("grid.omega3", omega3)])?.build()?;
            experiment::elliptic_eval(&config, parse_complex(z)?, std::io::stdout().lock())
        }
        Command::Run { preset, out } => {
            let config = overrides(b, &[("preset", preset)])?.build()?;
            run_preset(&config, out.as_deref())
        }
    }
}

fn parse_complex(s: &str) -> CliResult<Complex64> {
    let bad = || CliError::Usage(format!("--z expects RE or RE,IM, got {s:?}"));
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad()));
    let re = parts.next().ok_or_else(bad)??;
    let im = parts.next().transpose()?.unwrap_or(0.0);
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn verify_command(config: &ExperimentConfig, only: &[String], report: &Path) -> CliResult<()> {
    let only: Vec<String> = if only.is_empty() { config.only.clone() } else { only.to_vec() };
    let w = output(config, report)?;
    let outcomes = experiment::verify_report(config, &only, w)?;
    let count = |s: Status| outcomes.iter().filter(|o| o.status == s).count();
    eprintln!(
        "verify: {} pass, {} fail, {} error, {} skipped",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Error),
        count(Status::Skip)
    );
    match verify::failures(&outcomes) {
        0 => Ok(()),
        n => Err(CliError::VerifyFailed(n)),
    }
}

fn run_preset(config: &ExperimentConfig, out: Option<&Path>) -> CliResult<()> {
    let file = out.unwrap_or_else(|| Path::new(experiment::preset_file(config.preset)));
    match config.preset {
        Preset::Verify => verify_command(config, &[], file),
        Preset::Evolve => {
            let traj = experiment::run_evolve(config)?;
            experiment::write_evolve(config, &traj, &resolve(config, file), &resolve(config, Path::new("ledger.csv")))
        }
        Preset::SweepKappa => experiment::sweep_kappa(config, output(config, file)?),
        Preset::CnoidalAsymptotics => experiment::cnoidal_asymptotics(config, output(config, file)?),
        Preset::AlphaGrowth => {
            let w = output(config, file)?;
            experiment::alpha_growth(config, w)
        }
    }
}
