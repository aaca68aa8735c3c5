use thiserror::Error;

/// Error type shared by every module of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad spec, mismatched index sets, out-of-domain values.
    #[error("validation error: {0}")]
    Validation(String),

    /// An exact routine was asked to run past its enumeration guard.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A numeric routine failed to converge or to bracket a root.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An internal cross-check failed; this signals a bug, not bad input.
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
    pub fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }
}
