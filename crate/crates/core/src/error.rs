use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node index {0}")]
    UnknownNode(usize),
    #[error("unknown node name `{0}`")]
    UnknownName(String),
    #[error("duplicate node name `{0}`")]
    DuplicateName(String),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("graph has a directed cycle through node {0}")]
    Cycle(usize),
    #[error("graph is not a DAG: edge {0} -- {1} is not directed")]
    NotDirected(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("column `{0}` has zero variance")]
    ConstantColumn(String),
    #[error("collinear conditioning set for ({x}, {y})")]
    CollinearConditioning { x: usize, y: usize },
    #[error("collinear parents for node {0}")]
    CollinearParents(usize),
    #[error("insufficient samples: n = {n}, conditioning set size = {cond}")]
    InsufficientSamples { n: usize, cond: usize },
    #[error("invalid search operator: {0}")]
    InvalidOperator(String),
    #[error("time limit exceeded")]
    Timeout,
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, msg: msg.into() }
    }
}
