use thiserror::Error;

/// Errors raised by model evaluation, quadrature and the check harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature failure after {evaluations} evaluations: estimate {estimate}, error estimate {error}")]
    QuadratureFailure {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("integrand evaluated to a non-finite value at {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("{quantity} is undefined at {x}: {reason}")]
    Domain {
        quantity: &'static str,
        x: f64,
        reason: String,
    },

    #[error("mean does not exist")]
    MeanDoesNotExist,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported for this variant: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, x: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            quantity,
            x,
            reason: reason.into(),
        }
    }

    /// True for failures caused by numerics rather than by bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. } | Error::NonFiniteIntegrand { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
