use thiserror::Error;

/// Errors produced by the link model and its front ends.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state dimension mismatch: {left} vs {right} modes")]
    DimensionMismatch { left: usize, right: usize },

    /// Bob never obtains a conclusive outcome, so the conditional error rate is undefined.
    #[error("QBER undefined: no conclusive events (G = 1)")]
    UndefinedQber,

    #[error("no positive key rate anywhere on the modulation grid at {loss_db} dB")]
    NoPositiveRate { loss_db: f64 },

    #[error("protocol {0} is analysis-only and has no channel model")]
    UnsupportedProtocol(&'static str),

    /// A Monte Carlo estimate fell outside its acceptance band.
    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag used on the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::UndefinedQber => "undefined-qber",
            Error::NoPositiveRate { .. } => "no-positive-rate",
            Error::UnsupportedProtocol(_) => "unsupported-protocol",
            Error::ValidationFailed(_) => "validation-failed",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
