use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] dqcd_core::Error),

    #[error("invalid option: {0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{failed} of {total} runs failed: {first}")]
    RunsFailed { failed: usize, total: usize, first: String },

    #[error("operator is unstable: {0}")]
    Unstable(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
