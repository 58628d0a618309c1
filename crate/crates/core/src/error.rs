use std::path::PathBuf;

use thiserror::Error;

use crate::tasks::TaskId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("empty batch passed to {0}")]
    EmptyBatch(&'static str),

    #[error("invalid label {label} at index {index}; labels must be 0 or 1")]
    InvalidLabel { index: usize, label: u8 },

    #[error("degenerate AUC: {positives} positive and {negatives} negative labels")]
    DegenerateAuc { positives: usize, negatives: usize },

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("pool exhausted for task {task}: {reason}")]
    PoolExhausted { task: TaskId, reason: String },

    #[error("all-task sampling needs a meta-batch of {pool} tasks, got {requested}")]
    AllTaskBatchSize { pool: usize, requested: usize },

    #[error("empty task pool")]
    EmptyTaskPool,

    #[error("meta-gradient requires at least one episode")]
    NoEpisodes,

    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Attaches a pipeline stage name to an error.
pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| Error::Stage {
            stage,
            source: Box::new(source),
        })
    }
}
