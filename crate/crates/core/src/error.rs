use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the extraction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("unsupported PLY: {0}")]
    UnsupportedPly(String),

    #[error("cannot determine point cloud format of {0}")]
    UnknownFormat(PathBuf),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("point index {index} out of range for {len} points")]
    InvalidIndex { index: usize, len: usize },

    #[error("invalid neighbor count k = {k}: {reason}")]
    InvalidK { k: usize, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("length mismatch: {what} has {actual} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("need at least 3 points to fit a plane, got {0}")]
    TooFewPoints(usize),

    #[error("points are collinear; plane is undefined")]
    Collinear,

    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
