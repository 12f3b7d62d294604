use std::path::PathBuf;

use crate::snapshot::SnapshotError;

/// Configuration problem located at a dotted key path such as `solver.dt`.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{key}: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { key: key.into(), message: message.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("snapshot {}: {source}", path.display())]
    Snapshot { path: PathBuf, source: SnapshotError },
    #[error(transparent)]
    Compute(#[from] bogs::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit status: 2 for usage and configuration errors, 3 for
    /// numerical failures, 4 for file errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownCommand(_) => 2,
            CliError::Compute(_) => 3,
            CliError::Io { .. } | CliError::Snapshot { .. } | CliError::Csv(_) => 4,
        }
    }
}
