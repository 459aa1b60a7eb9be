use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("occupation {occupation:?} out of range for cutoffs {cutoffs:?}")]
    OccupationOutOfRange {
        occupation: Vec<usize>,
        cutoffs: Vec<usize>,
    },
    #[error("mode {mode} out of range for a {modes}-mode layout")]
    InvalidMode { mode: usize, modes: usize },
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("joint dimension overflows addressable memory")]
    DimensionOverflow,
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("conditioning on an event with probability {0:e}")]
    ImpossibleOutcome(f64),
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("sequence is not normalizable without a convergent prefactor")]
    NonNormalizable,
    #[error("truncation leakage {leakage:e} exceeds {threshold:e}{}", .suggestion.map(|c| format!("; try cutoff >= {c}")).unwrap_or_default())]
    Leakage {
        leakage: f64,
        threshold: f64,
        suggestion: Option<usize>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
