use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, IrlError>;

#[derive(Debug, Error)]
pub enum IrlError {
    #[error(transparent)]
    Core(#[from] irl_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Stream(#[from] std::io::Error),
    /// Well-formed JSON whose content is inconsistent.
    #[error("{0}")]
    Format(String),
    #[error("invalid experiment config: {0}")]
    Config(String),
}
