use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("multiplier is not Hermitian-symmetric at xi = {xi}: m(-xi) = {minus}, conj(m(xi)) = {conj_plus}")]
    Symmetry {
        xi: f64,
        minus: String,
        conj_plus: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("truncation window too small: edge value {edge:e} exceeds {limit:e}")]
    Truncation { edge: f64, limit: f64 },

    #[error("argument within {distance:e} of a lattice pole")]
    PoleProximity { distance: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("energy -kappa^2 = {energy} lies inside a spectral band (monodromy trace {trace})")]
    SpectralBand { energy: f64, trace: f64 },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("periodic kernel is not one-dimensional (singular values {smallest:e}, {second:e})")]
    DegenerateKernel { smallest: f64, second: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("lattice configuration error: imaginary residue {residue:e}")]
    LatticeConfiguration { residue: f64 },

    #[error("solution blew up at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    #[error("flow failed at t = {time}: {source}")]
    Flow {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// The innermost error, unwrapping flow-time context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Flow { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_spectral_band(&self) -> bool {
        matches!(self.root(), Error::SpectralBand { .. })
    }

    pub fn is_blow_up(&self) -> bool {
        matches!(self.root(), Error::BlowUp { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
