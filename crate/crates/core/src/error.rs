use std::path::PathBuf;

use thiserror::Error;

use crate::complex::{Edge, Face};

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u64, n: usize },

    #[error("face ({0}, {1}, {2}) has repeated vertices")]
    DegenerateFace(u64, u64, u64),

    #[error("duplicate face {0}")]
    DuplicateFace(Face),

    #[error("edge {edge} is not free (degree {degree})")]
    NotFree { edge: Edge, degree: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid sample spec: {0}")]
    InvalidSpec(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("root solver: {0}")]
    Solver(String),

    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
