use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Analysis {
        context: String,
        #[source]
        source: varconv::Error,
    },

    #[error("report: {0}")]
    Report(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Attaches the failing step to a library error.
pub trait Context<T> {
    fn context(self, what: &str) -> CliResult<T>;
}

impl<T> Context<T> for varconv::Result<T> {
    fn context(self, what: &str) -> CliResult<T> {
        self.map_err(|source| CliError::Analysis {
            context: what.to_string(),
            source,
        })
    }
}
