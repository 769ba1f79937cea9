use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration has no masses")]
    EmptyConfig,

    #[error("mass at index {index} is {value}; masses must be finite and strictly positive")]
    InvalidMass { index: usize, value: f64 },

    #[error("coalescent time must be positive and finite, got {0}")]
    InvalidTime(f64),

    #[error("power sum order must be 1, 2 or 3, got {0}")]
    InvalidPower(u32),

    #[error("clock vector has length {got}, expected {expected}")]
    ClockLength { expected: usize, got: usize },

    #[error("clock at index {index} is {value}; clocks must be finite and nonnegative")]
    InvalidClock { index: usize, value: f64 },

    #[error("exhaustive enumeration is limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("vertex rank {0} is a root; it has no influence region")]
    RootVertex(usize),

    #[error("invalid ornamented excursion: {0}")]
    InvalidExcursion(String),

    #[error("invalid limit parameters: {0}")]
    InvalidLimitParams(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
