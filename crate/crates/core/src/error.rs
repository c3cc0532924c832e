use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("window beyond sequence: start {start} but last stored index is {last:?}")]
    WindowBeyondSequence { start: usize, last: Option<usize> },

    #[error("invalid tolerance {0}: must be finite and > 0")]
    InvalidTolerance(f64),

    #[error("empty sequence")]
    EmptySequence,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("generator disagrees with stored value at n = {index}: stored {stored}, generator {generated}")]
    GeneratorMismatch {
        index: usize,
        stored: f64,
        generated: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("cannot bound series tail: {0}")]
    UnboundedTail(String),

    #[error("dimension mismatch: expected at least {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolve failed: {0}")]
    Eigensolve(String),

    #[error("negative component present: apply to total variation")]
    NegativeComponent,

    #[error("hypothesis of the radial characterization not met: {0}")]
    HypothesisNotMet(String),

    #[error("non-real symbol: {0}")]
    NonRealSymbol(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_tolerance(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(eps))
    }
}
