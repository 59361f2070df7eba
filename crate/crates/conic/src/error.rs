use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConicError {
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error("backend rejected the program: {0}")]
    Backend(String),
    #[error("dump parse error on line {line}: {msg}")]
    Dump { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, ConicError>;
