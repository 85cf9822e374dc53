use thiserror::Error;

/// Errors raised by the samplers, estimators and measure computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("insufficient samples: {effective:.1} effective samples in range, need at least {required}")]
    InsufficientSamples { effective: f64, required: usize },

    #[error("non-finite result in {context}")]
    NonFinite { context: &'static str },

    #[error("weighting mismatch: ensemble is {found}, cannot apply {requested}")]
    WeightMismatch { found: String, requested: String },

    #[error("region leaves the simulation domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
