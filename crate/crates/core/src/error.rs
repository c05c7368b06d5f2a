use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::physics::PhysicsError;

/// Every configuration problem found, reported together.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid configuration:\n  - {}", .violations.join("\n  - "))]
pub struct ConfigError {
    pub violations: Vec<String>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Config(ConfigError {
            violations: vec![message.into()],
        })
    }

    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Analysis(_) => 2,
            Error::Io { .. } => 3,
            Error::Physics(_) => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
