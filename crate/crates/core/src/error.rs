use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("mode {mode} out of range for order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("invalid mode subset: {0}")]
    InvalidSubset(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),

    #[error("invalid rank: {0}")]
    InvalidRank(String),

    #[error("invalid epsilon {eps}: {reason}")]
    InvalidEpsilon { eps: f64, reason: &'static str },

    #[error("budget {budget} is below the minimum feasible cost {minimum}")]
    BudgetTooSmall { budget: u64, minimum: u64 },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("npy format error: {0}")]
    Npy(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by malformed input files rather than bad parameters.
    pub fn is_format_error(&self) -> bool {
        matches!(
            self,
            Error::Npy(_)
                | Error::Json(_)
                | Error::InvalidInstance(_)
                | Error::InvalidTopology(_)
                | Error::NonFinite(_)
                | Error::InvalidShape(_)
        )
    }
}
