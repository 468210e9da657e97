use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("non-finite entry")]
    NonFinite,

    #[error("scalar only: symbol entries are not scalar multiples of the identity")]
    ScalarOnly,

    #[error("constraint matrices are linearly dependent")]
    DependentConstraints,

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::DimensionMismatch(msg.into()))
}
