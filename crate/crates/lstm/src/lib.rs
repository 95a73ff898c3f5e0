//! A from-scratch LSTM forecaster.
//!
//! One recurrent layer feeds its final hidden state into a dense head with a
//! rectifier output. Training minimises mean absolute error with mini-batch
//! Adam; gradients come from hand-written backpropagation through time.
//!
//! Gate blocks are stored stacked in the order input, forget, output,
//! candidate (see [`Gate`]).

mod adam;
mod backward;
mod error;
mod forward;
mod loss;
mod model;
mod params;
mod train;

pub use adam::{AdamConfig, AdamState};
pub use backward::{clip_global_norm, NetworkGrads};
pub use error::{LstmError, Result};
pub use forward::ForwardCache;
pub use loss::mae_loss;
pub use model::LstmModel;
pub use params::{DenseHead, Gate, LstmParams, Network};
pub use train::{train, TrainConfig};
