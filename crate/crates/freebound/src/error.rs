//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-manifold edge ({a}, {b}) shared by {count} faces")]
    NonManifoldEdge { a: usize, b: usize, count: usize },

    #[error("inconsistent orientation across edge ({a}, {b})")]
    InconsistentOrientation { a: usize, b: usize },

    #[error("degenerate face {face} (area {area:.3e})")]
    DegenerateFace { face: usize, area: f64 },

    #[error("boundary edges do not close into loops near vertex {vertex}")]
    OpenBoundary { vertex: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mesh has no boundary")]
    NoBoundary,

    #[error("inadmissible configuration: {0}")]
    Inadmissible(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Error {
        Error::Parse { line, msg: msg.into() }
    }

    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
