use thiserror::Error;

/// Errors raised by the geometry routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("gluing violation: residual {residual:.3e} exceeds {tolerance:.1e} ({what})")]
    GluingViolation {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Short machine-readable kind, used by report writers.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Capacity(_) => "capacity",
            Error::GluingViolation { .. } => "gluing-violation",
            Error::Numerical(_) => "numerical",
            Error::Parse(_) => "parse",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
