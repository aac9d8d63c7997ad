//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("boundary mismatch: cannot compose ({0},{1}) after ({2},{3})")]
    BoundaryMismatch(usize, usize, usize, usize),

    #[error("index {index} out of range for {n} strands")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("odd number of boundary points: {0}+{1}")]
    OddBoundary(usize, usize),

    #[error("matching is not a fixed-point-free involution")]
    NotAnInvolution,

    #[error("matching has crossing strands")]
    NotPlanar,

    #[error("diagram carries circles where a circle-free diagram is required")]
    UnexpectedCircles,

    #[error("diagram has no circle to remove")]
    MissingCircle,

    #[error("division by zero")]
    DivisionByZero,

    #[error("linear system is singular or inconsistent")]
    SingularSystem,

    #[error("series truncation order {through} is too small: {need}")]
    InsufficientOrder { through: String, need: String },

    #[error("mirror would flip the validity bound of a one-sided series")]
    MirrorValidity,

    #[error("operation requires integer gradings, found half-integer")]
    HalfIntegerGrading,

    #[error("braid letter must be negative here (positive letter s{0})")]
    PositiveLetter(usize),

    #[error("chain map does not commute with the differentials")]
    NotAChainMap,

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}
