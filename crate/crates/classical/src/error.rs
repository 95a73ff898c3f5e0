use thiserror::Error;

pub type Result<T, E = ClassicalError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: need at least {needed} observations, got {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("kernel matrix is ill-conditioned: {0}")]
    IllConditionedKernel(String),

    #[error("hyperparameter optimisation failed: {0}")]
    OptimizationFailed(String),

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("order selection failed: {0}")]
    SelectionFailed(String),

    #[error(transparent)]
    Core(#[from] pricecast_core::Error),
}
