use thiserror::Error;

/// Errors raised by the solvers and evaluators in this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `e^{u^2}` (or another exponential) leaves the binary64 range.
    #[error("range error: {0}")]
    Range(String),

    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    Stiffness { t: f64, h: f64 },

    #[error("no sign change of the shooting residual on [{lo:e}, {hi:e}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("solution rejected: {0}")]
    SolutionRejected(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("fixed point did not converge after {} iterations", history.len())]
    Convergence { history: Vec<f64> },

    #[error("ambiguous result: {0}")]
    Ambiguity(String),
}

impl Error {
    /// Argument errors are the caller's fault; everything else is a numerical failure.
    pub fn is_invalid_argument(&self) -> bool {
        matches!(self, Error::InvalidArgument(_))
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Range(_) => "range",
            Error::Stiffness { .. } => "stiffness",
            Error::BracketFailure { .. } => "bracket-failure",
            Error::SolutionRejected(_) => "solution-rejected",
            Error::NotFound(_) => "not-found",
            Error::Convergence { .. } => "convergence",
            Error::Ambiguity(_) => "ambiguity",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
