use thiserror::Error;

use crate::pulse::Transition;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not normalized: |ψ|² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("off-resonant drive (detunings {detunings:?}); only resonant dynamics are supported")]
    OffResonance { detunings: [f64; 3] },

    #[error("invalid pulse on {transition:?}: {message}")]
    InvalidPulse { transition: Transition, message: String },

    #[error("transition {0:?} appears more than once in the schedule")]
    DuplicateTransition(Transition),

    #[error("schedule has no pulse on {0:?}")]
    MissingTransition(Transition),

    #[error("sign factors must be +1 or -1, got {0:?}")]
    InvalidSign([i8; 3]),

    #[error("invalid propagation window: {0}")]
    InvalidWindow(String),

    #[error("1-3 and 2-3 envelopes differ ({0}); the dark-state reduction does not apply")]
    CptConditionViolated(String),

    #[error("dark state undefined: both couplings are zero")]
    ZeroCoupling,

    #[error("normalization drift {drift:.3e} at t = {t}; reduce dt or switch method")]
    NormDrift { t: f64, drift: f64 },

    #[error("population triple {0:?} does not sum to 1")]
    PopulationSum([f64; 3]),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("sweep failed at (Δ, Δ′, δφ) = ({delta}, {delta_prime}, {delta_phi}): {source}")]
    SweepPoint {
        delta: f64,
        delta_prime: f64,
        delta_phi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    /// True for failures of the numerical integration itself, as opposed to
    /// bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NormDrift { .. } => true,
            Error::SweepPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    /// Process exit status: 1 for invalid input, 2 for numerical failure,
    /// 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            2
        } else if matches!(self, Error::Io(_)) {
            3
        } else {
            1
        }
    }
}
