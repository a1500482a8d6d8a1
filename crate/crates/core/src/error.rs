use thiserror::Error;

use crate::solvers::Unsolvable;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("matrix is not in the image of the complex adjoint map (block defect {defect:e})")]
    NotAdjointImage { defect: f64 },

    #[error("equation is not solvable: {0}")]
    Unsolvable(Unsolvable),

    /// Decryption produced something that is not a pair of images.
    #[error("key mismatch: {0}")]
    KeyMismatch(String),

    #[error("image format: {0}")]
    Image(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::DimensionMismatch { op, left, right }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
