use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Scenario { context: String, source: cclab_core::Error },
    #[error("report encoding failed: {0}")]
    Encode(String),
}

impl CliError {
    /// Exit status for the command line: every error here is an input or
    /// I/O problem.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
