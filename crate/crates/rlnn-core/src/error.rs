use thiserror::Error;

/// Errors produced by the pricing and hedging library.
#[derive(Debug, Error)]
pub enum RlnnError {
    #[error("correlation matrix is not positive semi-definite (pivot {pivot:e} at row {index})")]
    NotPositiveSemiDefinite { pivot: f64, index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("payoff specification is missing required field `{0}`")]
    MissingField(&'static str),

    #[error("network input space does not match the requested operation")]
    InputSpaceMismatch,

    #[error("invalid exercise schedule: {0}")]
    InvalidSchedule(String),

    #[error("schedule date {date} does not align with any tree layer")]
    ScheduleMisaligned { date: f64 },

    #[error("portfolio matured at {maturity} cannot be valued at t = {t}")]
    StalePortfolio { t: f64, maturity: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("serialization failed: {0}")]
    Serialization(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RlnnError>;
