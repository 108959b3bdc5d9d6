use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error category, mapped onto process exit codes by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Parameter,
    Input,
    Runtime,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Parameter => 2,
            Category::Input => 3,
            Category::Runtime => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: node {node} is not in the graph")]
    UnknownNode { path: PathBuf, line: usize, node: u64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("node {0} is already a sensor")]
    AlreadySensor(u32),

    #[error("node {0} is out of range")]
    NodeOutOfRange(u32),

    #[error("unknown cascade {0}")]
    UnknownCascade(u64),

    #[error("empty candidate set in round {round}")]
    EmptyCandidates { round: usize },

    #[error("{0}")]
    Runtime(String),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> Category {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::UnknownNode { .. } => Category::Input,
            Error::Parameter(_) => Category::Parameter,
            _ => Category::Runtime,
        }
    }
}
