use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("rank-deficient channel estimate matrix at AP {ap}")]
    RankDeficient { ap: usize },

    #[error("failed to parse configuration: {0}")]
    Parse(String),
}
