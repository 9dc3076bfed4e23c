use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside a function's domain.
    #[error("{func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// An observation has Euclidean norm exactly zero, where the evidence
    /// density is singular.
    #[error("observation {row} has zero norm; remove or jitter it")]
    ZeroNorm { row: usize },

    #[error("symmetric eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("signal eigenvalue {lambda_d} at d = {d} does not exceed the noise estimate {sigma2}")]
    ModelMismatch { d: usize, lambda_d: f64, sigma2: f64 },

    /// An input violates a documented precondition (shape, centering, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { func, msg: msg.into() }
    }

    /// True for failures of a numerical procedure rather than bad input.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::NotPositiveDefinite | Error::ModelMismatch { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
