use thiserror::Error;

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] swipt_core::Error),

    #[error(transparent)]
    Sca(#[from] swipt_sca::ScaError),

    #[error("nothing to plot: {0}")]
    EmptyPlot(String),
}
