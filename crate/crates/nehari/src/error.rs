use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NehariError {
    #[error(transparent)]
    Core(#[from] nehari_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl NehariError {
    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        NehariError::Schema { field: field.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        NehariError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, NehariError>;
