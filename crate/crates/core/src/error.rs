use thiserror::Error;

/// Errors raised by problem setup, integration, and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem `{id}`: {reason}")]
    InvalidProblem { id: String, reason: String },

    #[error("non-finite value {value} produced at t = {t}")]
    NonFinite { t: f64, value: f64 },

    #[error("problem `{0}` has no exact solution; the metric is unsupported")]
    MissingExact(String),

    #[error(
        "implicit solve did not converge after {iterations} iterations (residual {residual:e})"
    )]
    ImplicitSolve { iterations: usize, residual: f64 },

    #[error("need {needed} history entries, have {available}")]
    InsufficientHistory { needed: usize, available: usize },

    #[error("{method} requires at least {min} steps, got {n}")]
    TooFewSteps {
        method: &'static str,
        min: usize,
        n: usize,
    },

    #[error("{0} is not an adaptive RBF method")]
    NotRbfMethod(&'static str),

    #[error("{0} is not a linear multistep method")]
    NotMultistep(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("interpolation matrix is ill-conditioned (pivot {pivot:e})")]
    Conditioning { pivot: f64 },

    #[error("root finding failed after {iterations} iterations (residual {residual:e})")]
    RootFinding { iterations: usize, residual: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::ImplicitSolve { .. }
                | Error::Conditioning { .. }
                | Error::RootFinding { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
