use thiserror::Error;

/// Errors produced by constructors, evaluators and estimators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An input object fails a structural validity check.
    #[error("validation error: {0}")]
    Validation(String),
    /// An input is numerically degenerate (rank deficient, zero volume, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// A rejection loop exceeded its retry budget.
    #[error("resampling budget exhausted: {0}")]
    ResamplingExhausted(String),
    /// The requested identity label is not in the catalog.
    #[error("unknown identity: {0}")]
    UnknownIdentity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
