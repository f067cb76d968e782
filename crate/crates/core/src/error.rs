use thiserror::Error;

/// Errors raised by the library. Verdict-returning checks (network validation,
/// temporal cactus verification) report problems as data instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("input matrix of subsystem {subsystem} is not dedicated: column {column} has {nonzeros} nonzeros")]
    NotDedicated {
        subsystem: usize,
        column: usize,
        nonzeros: usize,
    },

    #[error("subsystem count {n_subsystems} outside the admissible range {min}..={max}")]
    BadN {
        n_subsystems: usize,
        min: usize,
        max: usize,
    },

    #[error("subsystem index {index} out of range (network has {n_subsystems} subsystems)")]
    BadIndex { index: usize, n_subsystems: usize },

    #[error("invalid target set: {0}")]
    BadTarget(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("negative edge weight {weight} on ({left}, {right})")]
    NegativeWeight {
        left: usize,
        right: usize,
        weight: f64,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("non-conformable operands: {0}")]
    NonConformable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("network file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
