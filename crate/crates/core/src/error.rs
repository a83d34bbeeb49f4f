use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex}: {reason}")]
    VertexState { vertex: usize, reason: &'static str },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dead(vertex: usize) -> Self {
        Error::VertexState { vertex, reason: "vertex is dead" }
    }

    pub(crate) fn out_of_range(vertex: usize) -> Self {
        Error::VertexState { vertex, reason: "vertex id out of range" }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 3,
            _ => 2,
        }
    }
}
