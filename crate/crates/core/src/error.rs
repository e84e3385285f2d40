use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain the operation accepts.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix or state failed a structural check (Hermiticity, trace, positivity).
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    /// Truncated Fock-space state loses more weight than allowed.
    #[error("truncation error: tail weight {tail:.3e} exceeds {limit:.1e} at n_max = {n_max}")]
    Truncation { tail: f64, limit: f64, n_max: usize },

    #[error("integration failed: {0}")]
    Integration(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
