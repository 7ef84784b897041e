use std::io;

use thiserror::Error;

/// Errors produced by the kernel, index, dataset and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("incompatible codes: psi {psi_a} / t {t_a} vs psi {psi_b} / t {t_b}")]
    IncompatibleCodes {
        psi_a: usize,
        t_a: usize,
        psi_b: usize,
        t_b: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("context required: {0} needs a neighbor context")]
    ContextRequired(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("k out of range: k = {k}, n = {n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("labels required: {0}")]
    LabelsRequired(&'static str),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("zero mean dissimilarity: the query coincides with every point")]
    ZeroMean,

    #[error("no matched-distance pairs within tolerance {0}; increase n")]
    NoMatchedPairs(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
