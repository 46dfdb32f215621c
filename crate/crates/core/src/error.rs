use thiserror::Error;

/// Errors raised by field construction, evaluation and verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("chart mismatch: expected `{expected}`, found `{found}`")]
    ChartMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate index {index} out of range for a {dim}-dimensional chart")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("point lies on the singular set of the field")]
    Singular,

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("complex constant cannot be evaluated over a real scalar type")]
    NonRealConstant,

    #[error("empty sample")]
    EmptySample,

    #[error("could only draw {drawn} of {wanted} sample points off the singular set")]
    SamplingExhausted { wanted: usize, drawn: usize },

    #[error("power sequence is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("restriction failed: off-block coupling {residual:.3e} exceeds {tolerance:.1e}")]
    OffBlockCoupling { residual: f64, tolerance: f64 },
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
