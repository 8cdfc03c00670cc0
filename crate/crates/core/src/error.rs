use thiserror::Error;

/// Errors raised by the numerical library.
///
/// Variants fall into two groups: input/domain problems (the caller asked for
/// something outside an operation's contract) and numerical failures
/// (quadrature or iteration did not reach the requested accuracy).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole proximity: |{what}| = {distance:e} is below the floor {floor:e}")]
    PoleProximity {
        what: String,
        distance: f64,
        floor: f64,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("gap violation: {0}")]
    GapViolation(String),

    #[error("periodicity error: {0}")]
    Periodicity(String),

    #[error("singular matrix at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("quadrature did not converge: estimate {estimate:e} above tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("integrand does not decay: |f| at the window edge is {edge:e} against peak {peak:e}")]
    NonDecaying { edge: f64, peak: f64 },

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
