use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("preflight refused the run: {0}")]
    Preflight(String),
    #[error("{0} assertion(s) failed")]
    Assertion(usize),
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numeric(#[from] orlicz_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 0 ok, 1 numerical failure, 2 config, 3 preflight, 4 assertion, 5 IO.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(_) => 1,
            CliError::Config(_) => 2,
            CliError::Preflight(_) => 3,
            CliError::Assertion(_) => 4,
            CliError::Io { .. } => 5,
        }
    }
}
