//! Library behind the `kdvlab` binary: configuration, the verify suite and experiments.

pub mod config;
pub mod experiment;
pub mod verify;

use std::fmt;

pub use config::{ConfigBuilder, ExperimentConfig, Preset};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    /// A verify check failed or a computation failed for another reason.
    pub const FAILURE: u8 = 1;
    /// The spectral parameter lies in a band of the Schrodinger operator.
    pub const SPECTRAL_BAND: u8 = 2;
    pub const BLOW_UP: u8 = 3;
    pub const USAGE: u8 = 64;
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(kdv_core::Error),
    Io(std::io::Error),
    /// Number of failing verify checks.
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Core(e) if e.is_spectral_band() => exit::SPECTRAL_BAND,
            CliError::Core(e) if e.is_blow_up() => exit::BLOW_UP,
            CliError::Core(_) | CliError::Io(_) | CliError::VerifyFailed(_) => exit::FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::VerifyFailed(n) => write!(f, "{n} verify check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<kdv_core::Error> for CliError {
    fn from(e: kdv_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
