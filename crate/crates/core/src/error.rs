use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("duplicate point at index {index} (same as index {first})")]
    DuplicatePoint { index: usize, first: usize },

    #[error("minimum pairwise distance needs at least 2 points, got {0}")]
    DegenerateCloud(usize),

    #[error("index {index} out of range for cloud of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("noise tolerance must be positive and finite, got {0}")]
    InvalidDelta(f64),

    #[error("point at the origin cannot define a feasible rotation arc (pivot leaked into the pair set)")]
    PivotLeak,

    #[error("delta {delta} is not below half the minimum point spacing ({half_spacing})")]
    DeltaTooLarge { delta: f64, half_spacing: f64 },

    #[error("brute-force oracle limited to clouds of at most {limit} points, got {m} x {n}")]
    OracleTooLarge { m: usize, n: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
