use thiserror::Error;

pub type Result<T> = std::result::Result<T, ScaError>;

#[derive(Debug, Error)]
pub enum ScaError {
    #[error(transparent)]
    Core(#[from] swipt_core::Error),

    #[error(transparent)]
    Conic(#[from] swipt_conic::ConicError),

    #[error("mode enumeration refused for M = {m} (limit {limit})")]
    TooManyAps { m: usize, limit: usize },

    #[error("invalid mode vector: {0}")]
    InvalidModes(String),
}
