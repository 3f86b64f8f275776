use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by evaluators, algorithms and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value {value} at component {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("input outside the function domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("arity mismatch: {objectives} objectives but {weights} weights")]
    Arity { objectives: usize, weights: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("run with seed {seed} failed: {source}")]
    RunFailed {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
