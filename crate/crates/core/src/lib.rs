//! Periodic Schrodinger operators, diagonal Green's functions and the commuting `H_kappa`
//! flows that approximate KdV, with cnoidal closed forms as exact references.

pub mod cnoidal;
pub mod elliptic;
pub mod error;
pub mod flows;
pub mod io;
pub mod ode;
pub mod sampling;
pub mod schrodinger;
pub mod spectral;

pub use cnoidal::{CnoidalWeierstrass, HkTravelingWave};
pub use elliptic::Lattice;
pub use error::{Error, Result};
pub use flows::{Background, ConservedLedger, FlowKind, FlowSpec, Stepper, Trajectory};
pub use schrodinger::{AlphaValue, FloquetPair, GreenDiag, GreenMethod, Monodromy};
pub use spectral::{Field, PeriodicGrid};

/// Declared invariants of every module, keyed by module name.
pub const MODULE_INVARIANTS: [(&str, &[&str]); 5] = [
    ("spectral", spectral::INVARIANTS),
    ("elliptic", elliptic::INVARIANTS),
    ("schrodinger", schrodinger::INVARIANTS),
    ("cnoidal", cnoidal::INVARIANTS),
    ("flows", flows::INVARIANTS),
];
