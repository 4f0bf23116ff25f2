use thiserror::Error;

use crate::experiment::Violation;

/// Errors produced by the decision engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("record failed validation: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("duplicate experiment id `{0}`")]
    DuplicateId(String),

    #[error("unknown experiment id `{0}`")]
    NotFound(String),

    #[error("history is empty")]
    EmptyHistory,

    #[error("arm `{0}` has too few units (need at least {1})")]
    InsufficientArm(&'static str, usize),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("loss function returned a non-finite value for draw {draw}")]
    NonFiniteLoss { draw: usize },

    #[error("request too large: {points} grid points exceeds the limit of {limit}")]
    TooLarge { points: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input data rather than faults in the engine or I/O.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
