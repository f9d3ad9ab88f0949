use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The weight function is negative somewhere on the simplex or has
    /// non-positive expectation.
    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error(
        "no convergence after {iterations} iterations (gradient max-norm {gradient_norm:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        gradient_norm: f64,
        last: Vec<f64>,
    },

    /// A quantity underflowed or otherwise left the representable range.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("acceptance rate {rate:.3e} below the 1e-4 floor after {proposals} proposals")]
    LowAcceptance { rate: f64, proposals: u64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
