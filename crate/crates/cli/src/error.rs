use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bellpoly_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("cache entry {0:?} is unusable ({1}); rerun with --force")]
    Cache(PathBuf, String),
    #[error("cannot read scenario from {0:?}: {1}")]
    Scenario(PathBuf, String),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;
