//! Configuration, comparison studies and file output for the `chessflow`
//! command-line tool.

pub mod commands;
pub mod compare;
pub mod config;
pub mod svg;

pub use config::{Alignment, ConfigError, RunConfig, ShapeSpec};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation failed: {0}")]
    Sim(#[from] chessflow::Error),
    #[error("{0}")]
    Unsupported(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}
