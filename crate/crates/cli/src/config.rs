//! Flat `key=value` experiment configuration with section prefixes (`grid.n=256`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use kdv_core::flows::{FlowKind, Stepper};
use kdv_core::io::fmt_g17;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Keys and their defaults. An empty default means "unset".
const DEFAULTS: &[(&str, &str)] = &[
    ("name", "default"),
    ("preset", "verify"),
    ("seed", "1"),
    ("out", "."),
    ("grid.n", "128"),
    ("grid.omega1", "1"),
    ("grid.omega3", "1"),
    ("grid.period", ""),
    ("flow.kind", "kdv"),
    ("flow.kappa", ""),
    ("flow.dt", "1e-4"),
    ("flow.t_final", "0.02"),
    ("flow.stepper", "rk4_multiplier_exact"),
    ("flow.dealias", "true"),
    ("flow.record_every", "10"),
    ("flow.init", "preset:cnoidal"),
    ("flow.amplitude", "0.5"),
    ("flow.background", "cnoidal"),
    ("probe.kappas", ""),
    ("sweep.kappas", "8,16,32,64"),
    ("sweep.t_final", "0.02"),
    ("sweep.dt", "1e-4"),
    ("sweep.record_every", "20"),
    ("sweep.amplitude", "0.5"),
    ("sweep.background", "cnoidal"),
    ("asymptotics.kappas", "8,16,32,64"),
    ("growth.varkappa", "8"),
    ("growth.kappas", "16,32,64"),
    ("growth.dt", "1e-4"),
    ("growth.t_final", "0.02"),
    ("growth.record_every", "20"),
    ("growth.amplitude", "0.2"),
    ("verify.tolerance", ""),
    ("verify.only", ""),
];

/// Prefix of per-check tolerance overrides, `tol.<check>=<value>`.
pub const TOL_PREFIX: &str = "tol.";

/// Named experiments selectable with `preset=`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Verify,
    Evolve,
    SweepKappa,
    CnoidalAsymptotics,
    AlphaGrowth,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Verify,
        Preset::Evolve,
        Preset::SweepKappa,
        Preset::CnoidalAsymptotics,
        Preset::AlphaGrowth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Verify => "verify",
            Preset::Evolve => "evolve",
            Preset::SweepKappa => "sweep-kappa",
            Preset::CnoidalAsymptotics => "cnoidal-asymptotics",
            Preset::AlphaGrowth => "alpha-growth",
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                format!("unknown preset {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// Initial state of an `evolve` run.
#[derive(Clone, Debug, PartialEq)]
pub enum InitSpec {
    /// The cnoidal wave of the configured lattice.
    Cnoidal,
    /// A seeded smooth random field of sup norm `flow.amplitude`.
    Random,
    File(PathBuf),
}

impl FromStr for InitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            Some(("preset", "cnoidal")) => Ok(InitSpec::Cnoidal),
            Some(("preset", "random")) => Ok(InitSpec::Random),
            Some(("preset", other)) => Err(format!("unknown init preset {other:?}")),
            Some(("file", path)) if !path.is_empty() => Ok(InitSpec::File(PathBuf::from(path))),
            _ => Err(format!("init must be preset:cnoidal, preset:random or file:PATH, got {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub n: usize,
    pub omega1: f64,
    pub omega3: f64,
    /// Period for non-cnoidal states; the cnoidal period `2 omega1` when unset.
    pub period: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub kind: FlowKind,
    pub kappa: Option<f64>,
    pub dt: f64,
    pub t_final: f64,
    pub stepper: Stepper,
    pub dealias: bool,
    pub record_every: usize,
    pub init: InitSpec,
    pub amplitude: f64,
    pub cnoidal_background: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSettings {
    pub kappas: Vec<f64>,
    pub t_final: f64,
    pub dt: f64,
    pub record_every: usize,
    pub amplitude: f64,
    pub cnoidal_background: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthSettings {
    pub varkappa: f64,
    pub kappas: Vec<f64>,
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub amplitude: f64,
}

/// A fully resolved configuration. `raw` keeps the textual form the hash is taken over.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    raw: BTreeMap<String, String>,
    pub name: String,
    pub preset: Preset,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub grid: GridConfig,
    pub flow: FlowConfig,
    pub probe_kappas: Vec<f64>,
    pub sweep: SweepSettings,
    pub asymptotics_kappas: Vec<f64>,
    pub growth: GrowthSettings,
    /// Replaces every check tolerance when set.
    pub tolerance: Option<f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub only: Vec<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ConfigBuilder::new().build().expect("defaults are valid")
    }
}

impl fmt::Display for ExperimentConfig {
    /// The canonical text: one sorted `key=value` line per set key.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.raw {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.raw.get(key).map(String::as_str)
    }

    /// SHA-256 of the canonical text without `out`, so relocating outputs keeps the hash.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.raw.iter().filter(|(k, _)| k.as_str() != "out") {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Tolerance of `check`: the global override, else a `tol.` entry, else `default`.
    pub fn tolerance_for(&self, check: &str, default: f64) -> f64 {
        self.tolerance
            .or_else(|| self.tolerances.get(check).copied())
            .unwrap_or(default)
    }
}

/// Accumulates `key=value` assignments from defaults, a file and command-line overrides.
#[derive(Clone, Debug)]
pub struct ConfigBuilder {
    raw: BTreeMap<String, String>,
}

impl Default for ConfigBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ConfigBuilder {
    pub fn new() -> Self {
        let raw = DEFAULTS
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self { raw }
    }

    /// Parses config text: `#` starts a comment, blank lines are ignored, keys may appear once.
    pub fn parse_text(mut self, text: &str) -> Result<Self, CliError> {
        let mut seen = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value, got {line:?}", lineno + 1))
            })?;
            let k = k.trim();
            if seen.insert(k.to_string(), lineno + 1).is_some() {
                return Err(CliError::Usage(format!("config line {}: duplicate key {k:?}", lineno + 1)));
            }
            self = self.set(k, v.trim())?;
        }
        Ok(self)
    }

    /// Sets one key; an empty value unsets it.
    pub fn set(mut self, key: &str, value: &str) -> Result<Self, CliError> {
        let known = DEFAULTS.iter().any(|(k, _)| *k == key)
            || key.strip_prefix(TOL_PREFIX).is_some_and(|c| !c.is_empty());
        if !known {
            return Err(CliError::Usage(format!("unknown config key {key:?}")));
        }
        if value.is_empty() {
            self.raw.remove(key);
        } else {
            self.raw.insert(key.to_string(), value.to_string());
        }
        Ok(self)
    }

    pub fn build(self) -> Result<ExperimentConfig, CliError> {
        let r = Reader { raw: &self.raw };
        let omega1 = r.positive("grid.omega1")?;
        let grid = GridConfig {
            n: r.parse("grid.n")?,
            omega1,
            omega3: r.positive("grid.omega3")?,
            period: r.optional_positive("grid.period")?.unwrap_or(2.0 * omega1),
        };
        if grid.n < 8 || !grid.n.is_power_of_two() {
            return Err(CliError::Usage(format!("grid.n must be a power of two >= 8, got {}", grid.n)));
        }
        let flow = FlowConfig {
            kind: r.parse_with("flow.kind", |s| s.parse::<FlowKind>().map_err(|e| e.to_string()))?,
            kappa: r.optional_positive("flow.kappa")?,
            dt: r.positive("flow.dt")?,
            t_final: r.finite("flow.t_final")?,
            stepper: r.parse_with("flow.stepper", |s| s.parse::<Stepper>().map_err(|e| e.to_string()))?,
            dealias: r.parse("flow.dealias")?,
            record_every: r.count("flow.record_every")?,
            init: r.parse_with("flow.init", str::parse)?,
            amplitude: r.nonnegative("flow.amplitude")?,
            cnoidal_background: r.background("flow.background")?,
        };
        if flow.kind.needs_kappa() && flow.kappa.is_none() {
            return Err(CliError::Usage(format!("flow.kind={} needs flow.kappa", flow.kind.name())));
        }
        let sweep = SweepSettings {
            kappas: r.kappa_list("sweep.kappas")?,
            t_final: r.positive("sweep.t_final")?,
            dt: r.positive("sweep.dt")?,
            record_every: r.count("sweep.record_every")?,
            amplitude: r.nonnegative("sweep.amplitude")?,
            cnoidal_background: r.background("sweep.background")?,
        };
        let growth = GrowthSettings {
            varkappa: r.positive("growth.varkappa")?,
            kappas: r.kappa_list("growth.kappas")?,
            dt: r.positive("growth.dt")?,
            t_final: r.positive("growth.t_final")?,
            record_every: r.count("growth.record_every")?,
            amplitude: r.nonnegative("growth.amplitude")?,
        };
        let mut tolerances = BTreeMap::new();
        for k in self.raw.keys() {
            if let Some(check) = k.strip_prefix(TOL_PREFIX) {
                tolerances.insert(check.to_string(), r.positive(k)?);
            }
        }
        Ok(ExperimentConfig {
            name: r.text("name")?.to_string(),
            preset: r.parse_with("preset", str::parse)?,
            seed: r.parse("seed")?,
            out_dir: PathBuf::from(r.text("out")?),
            grid,
            flow,
            probe_kappas: r.optional_list("probe.kappas")?,
            sweep,
            asymptotics_kappas: r.kappa_list("asymptotics.kappas")?,
            growth,
            tolerance: r.optional_positive("verify.tolerance")?,
            tolerances,
            only: r
                .get("verify.only")
                .map(|s| s.split(',').map(|c| c.trim().to_string()).collect())
                .unwrap_or_default(),
            raw: self.raw,
        })
    }
}

struct Reader<'a> {
    raw: &'a BTreeMap<String, String>,
}

impl Reader<'_> {
    fn get(&self, key: &str) -> Option<&str> {
        self.raw.get(key).map(String::as_str)
    }

    fn text(&self, key: &str) -> Result<&str, CliError> {
        self.get(key).ok_or_else(|| CliError::Usage(format!("{key} must be set")))
    }

    fn parse_with<T>(&self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<T, CliError> {
        f(self.text(key)?).map_err(|e| CliError::Usage(format!("{key}: {e}")))
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.parse_with(key, |s| s.parse::<T>().map_err(|_| format!("cannot parse {s:?}")))
    }

    fn finite(&self, key: &str) -> Result<f64, CliError> {
        let v: f64 = self.parse(key)?;
        if !v.is_finite() {
            return Err(CliError::Usage(format!("{key} must be finite")));
        }
        Ok(v)
    }

    fn positive(&self, key: &str) -> Result<f64, CliError> {
        let v = self.finite(key)?;
        if v <= 0.0 {
            return Err(CliError::Usage(format!("{key} must be positive, got {}", fmt_g17(v))));
        }
        Ok(v)
    }

    fn nonnegative(&self, key: &str) -> Result<f64, CliError> {
        let v = self.finite(key)?;
        if v < 0.0 {
            return Err(CliError::Usage(format!("{key} must be nonnegative")));
        }
        Ok(v)
    }

    fn optional_positive(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key).map(|_| self.positive(key)).transpose()
    }

    fn count(&self, key: &str) -> Result<usize, CliError> {
        let v: usize = self.parse(key)?;
        if v == 0 {
            return Err(CliError::Usage(format!("{key} must be at least 1")));
        }
        Ok(v)
    }

    fn background(&self, key: &str) -> Result<bool, CliError> {
        match self.text(key)? {
            "cnoidal" => Ok(true),
            "none" => Ok(false),
            other => Err(CliError::Usage(format!("{key} must be cnoidal or none, got {other:?}"))),
        }
    }

    fn optional_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(s) => parse_kappas(s).map_err(|e| CliError::Usage(format!("{key}: {e}"))),
        }
    }

    fn kappa_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let v = self.optional_list(key)?;
        if v.is_empty() {
            return Err(CliError::Usage(format!("{key} must list at least one kappa")));
        }
        Ok(v)
    }
}

/// Comma-separated positive reals.
pub fn parse_kappas(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
            _ => Err(format!("expected a positive number, got {t:?}")),
        })
        .collect()
}
