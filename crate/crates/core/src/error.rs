use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("grid parameter n must be at least 1")]
    EmptyGrid,
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("weight mismatch: |nu| = {nu} but |lambda| + |mu| = {sum}")]
    WeightMismatch { nu: u64, sum: u64 },
    #[error("instance too large for overflow-free arithmetic (limit {limit} per part and weight)")]
    Overflow { limit: u64 },
    #[error("flow classes live on different grids (n = {0} vs n = {1})")]
    GridMismatch(usize, usize),
    #[error("throughput vector has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("closedness violated at triangle {0}")]
    NotClosed(usize),
    #[error("flow is not a hive flow: rhombus {0} has negative slack")]
    NotHiveFlow(usize),
    #[error("flow is not inside the capacity polytope")]
    NotInB,
    #[error("flow is not {0}-integral")]
    NotIntegral(u64),
    #[error("enumeration exceeded the cap of {0} points")]
    CapExceeded(usize),
    #[error("instance is not positive")]
    NotPositive,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
