use thiserror::Error;

/// Errors produced by the desira library.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument violated a precondition (non-finite input,
    /// out-of-range parameter, malformed spec).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Matrix/vector dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A categorical desirability was asked about a label it does not map.
    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    /// Two design points coincide (within tolerance), so distance-based
    /// criteria are undefined.
    #[error("zero distance between design points: {0}")]
    ZeroDistance(String),

    /// Gaussian-process training could not factorize the covariance even
    /// after jitter escalation.
    #[error("gaussian process fit failed: {0}")]
    GpFit(String),

    /// A configuration document could not be parsed or resolved.
    #[error("config error (line {line}): {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn config(line: usize, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
