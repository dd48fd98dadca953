use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid partition {0:?}: parts must be nonnegative and weakly decreasing")]
    InvalidPartition(Vec<i64>),

    #[error("invalid sequence {0:?}: parts must be nonnegative")]
    InvalidSequence(Vec<i64>),

    #[error("{inner:?} is not contained in {outer:?}")]
    NotContained { outer: Vec<i64>, inner: Vec<i64> },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The result computed with a degree cap differs from the one computed with cap + 1.
    #[error("truncation at beta-degree cap {cap} has not stabilized")]
    Unstabilized { cap: u32 },

    #[error("size {size} exceeds the configured bound {bound}")]
    TooLarge { size: usize, bound: usize },

    #[error("parse error: {0}")]
    Parse(String),

    /// Two routes that must agree did not. Never an input error.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}
