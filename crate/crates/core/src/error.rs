use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid input: dimension mismatch, non-finite entries, bad parameters.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A geometric construction failed (degenerate hull, non-complementary subspaces).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A matrix that must be inverted is singular or too badly conditioned.
    #[error("singular matrix (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    /// An operation was called outside its contract.
    #[error("contract violated: {0}")]
    Contract(String),

    /// An iterative method did not converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A random generator exhausted its resampling budget.
    #[error("generation failed: {0}")]
    Generation(String),

    /// A specification file could not be interpreted.
    #[error("malformed specification: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
