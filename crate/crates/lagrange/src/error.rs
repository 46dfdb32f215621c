use haantjes::GeomError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopError {
    #[error(transparent)]
    Geom(#[from] GeomError),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid integration setup: {0}")]
    InvalidStep(String),

    #[error("trajectory reached the singular set at t = {t}")]
    SingularState { t: f64 },

    #[error("non-finite state after t = {last_valid}")]
    BlowUp { last_valid: f64 },
}

pub type Result<T, E = TopError> = std::result::Result<T, E>;
