//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty coordinate set")]
    EmptyCoordinateSet,
    #[error("graph is not chordal")]
    NotChordal,
    #[error("graph too large for exhaustive enumeration: d={d} exceeds limit {limit}")]
    TooLarge { d: usize, limit: usize },
    #[error("degenerate simplex (zero volume)")]
    DegenerateSimplex,
    #[error("degenerate tent domain (sites span a lower-dimensional set)")]
    DegenerateDomain,
    #[error("point lies outside the support polytope")]
    PointOutsideSupport,
    #[error("support polytope is lower-dimensional")]
    LowerDimensionalSupport,
    #[error("insufficient sample: n={n}, need at least {required}")]
    InsufficientSample { n: usize, required: usize },
    #[error("support polytope is degenerate (not full-dimensional)")]
    DegenerateSupport,
    #[error("matrix is not positive semidefinite")]
    NotPsd,
    #[error("matrix violates the required zero block structure")]
    BlockStructureViolation,
    #[error("nonzero matrix entries at non-edges: {0:?}")]
    GraphViolation(Vec<(usize, usize)>),
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
