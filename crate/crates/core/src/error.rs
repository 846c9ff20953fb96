use thiserror::Error;

use crate::analytic::DistributionFn;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular basis (determinant {0})")]
    SingularBasis(f64),

    #[error("maximal distance {maxdist} exceeds patch extent {extent}")]
    MaxDistExceedsPatch { maxdist: f64, extent: f64 },

    #[error("non-finite value while evaluating at k = {k}")]
    NonFinite { k: f64 },

    #[error("need at least {needed} patch sizes, got {got}")]
    TooFewSizes { needed: usize, got: usize },

    #[error("estimate and reference have no points in common")]
    EmptyOverlap,

    #[error(
        "distribution constructions disagree: max discrepancy {max_discrepancy:e} exceeds {tolerance:e}"
    )]
    DistributionMismatch {
        max_discrepancy: f64,
        tolerance: f64,
        trapezoid: Box<DistributionFn>,
        fourier: Box<DistributionFn>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
