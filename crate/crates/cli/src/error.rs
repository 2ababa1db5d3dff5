use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] coreshape::Error),

    #[error("{0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 2 usage, 3 input format, 4 infeasible budget, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use coreshape::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::BudgetTooSmall { .. }) => 4,
            CliError::Core(E::InvalidEpsilon { .. } | E::TooLarge(_) | E::InvalidRank(_)) => 2,
            CliError::Core(E::Io(_)) => 3,
            CliError::Core(e) if e.is_format_error() => 3,
            _ => 1,
        }
    }
}
