use std::path::PathBuf;

use thiserror::Error;
use toposheaf_core::engine::EngineError;
use toposheaf_core::sheaf::ConsistencyReport;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{at}: {message}")]
    Invalid { at: String, message: String },
    #[error("conflict at vertex {vertex}: {detail}")]
    Conflict { vertex: String, detail: String },
    #[error("network is inconsistent:\n{0}")]
    Inconsistent(ConsistencyReport),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl CliError {
    /// 1 for networks that are well-formed but unusable, 2 for bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Conflict { .. } | Self::Inconsistent(_) | Self::Engine(_) => 1,
            Self::Parse { .. } | Self::Io { .. } | Self::Invalid { .. } => 2,
        }
    }
}
