use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong short of a panic. Configuration errors are
/// caught at construction; `StepCapExceeded` is the only runtime failure a
/// well-formed simulation can produce.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("standard deviation must be finite and non-negative, got {0}")]
    InvalidStdDev(f64),

    #[error("variance schedule invalid: {0}")]
    InvalidSchedule(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("step cap {cap} exceeded (system size {size}): run failed to terminate plausibly")]
    StepCapExceeded { cap: u64, size: u64 },

    #[error("level must lie strictly inside (0, 1), got {0}")]
    InvalidLevel(f64),

    #[error("contact rate must be finite and positive, got {0}")]
    InvalidRate(f64),

    #[error("contact rate must exceed 1 for a giant component, got {0}")]
    SubcriticalRate(f64),

    #[error("tolerance must be finite and positive, got {0}")]
    InvalidTolerance(f64),

    #[error("sample set is empty")]
    EmptySample,

    #[error("exact enumeration supports at most 5 vertices, got {0}")]
    EnumerationTooLarge(u64),

    #[error("invalid evaluation grid: {0}")]
    InvalidGrid(&'static str),
}
