use num_rational::BigRational;
use thiserror::Error;

use crate::roots::VinbergState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate form: the Gram matrix has zero determinant")]
    Degenerate,

    #[error("Gram matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not an anti-involution: {0}")]
    NotInvolution(String),

    #[error("non-crystallographic angle between nodes {i} and {j}: normalized g^2 = {g2}")]
    NonCrystallographicAngle { i: usize, j: usize, g2: BigRational },

    #[error("subdiagram is not elliptic")]
    NotElliptic,

    #[error("unsupported dimension {0}: only n = 2 and n = 4 are supported")]
    UnsupportedDimension(usize),

    #[error("automorphism order must be positive")]
    NonpositiveAutomorphismOrder,

    #[error("unknown output format `{0}`")]
    UnknownFormat(String),

    /// Enumeration limits ran out before the finite-volume criterion held.
    #[error("Vinberg's algorithm did not terminate: {reason} ({} roots accepted)", state.accepted.len())]
    Incomplete {
        reason: String,
        state: Box<VinbergState>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
