use alloc::string::String;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result would overflow double precision.
    #[error("range error: {0}")]
    Range(String),

    /// An iterative routine ran out of its work budget. `estimate` is the
    /// best value available when it stopped (real part for complex results).
    #[error(
        "budget exhausted in {what}: best estimate {estimate:e}, error estimate {error_estimate:e}"
    )]
    Budget {
        what: String,
        estimate: f64,
        error_estimate: f64,
    },

    /// A regression could not be performed or did not describe the data.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// A structure function showed only one scaling regime.
    #[error("single scaling regime detected (slope {slope:.3})")]
    SingleRegime { slope: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateFit(msg.into())
    }

    /// True for errors that report an exhausted work budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
