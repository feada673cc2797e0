use thiserror::Error;

use crate::dyadic::DyadicInterval;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid mismatch: expected {expected} values, found {found}")]
    MismatchedGrid { expected: usize, found: usize },

    #[error("expected a scalar-valued function, found dimension {0}")]
    NotScalar(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("rectangle {time:?} x {freq:?} does not fit the grid resolution")]
    OutsideGrid {
        time: DyadicInterval,
        freq: DyadicInterval,
    },

    #[error("rectangle {time:?} x {freq:?} has the wrong area (scale sum {scale_sum})")]
    BadArea {
        time: DyadicInterval,
        freq: DyadicInterval,
        scale_sum: i32,
    },

    #[error("modulated Haar identity failed at cell {cell}")]
    IdentityViolation { cell: usize },

    #[error("tree is not a 2-tree")]
    NotATwoTree,

    #[error("tree selection did not terminate within {0} selections")]
    NonTermination(usize),

    #[error("{0} bitiles are not covered by any tree of the forest")]
    Coverage(usize),

    #[error("no weight for interval {0:?} at k = {1}")]
    MissingWeight(DyadicInterval, i32),

    #[error("oracle instance too large: {0} assignments")]
    InstanceTooLarge(u128),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
