use thiserror::Error;

pub type Result<T, E = LstmError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LstmError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("training diverged at epoch {epoch}: {detail}")]
    TrainingDiverged { epoch: usize, detail: String },

    #[error(transparent)]
    Core(#[from] pricecast_core::Error),
}
