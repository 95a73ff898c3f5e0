use ndarray::{Array2, Array3, Axis};
use pricecast_core::{CaseSpec, MinMaxScaler, SupervisedWindows};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adam::{AdamConfig, AdamState};
use crate::backward::clip_global_norm;
use crate::error::{LstmError, Result};
use crate::loss::mae_loss;
use crate::model::LstmModel;
use crate::params::Network;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden_size: usize,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub clip_norm: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { hidden_size: 50, max_epochs: 50, batch_size: 10, adam: AdamConfig::default(), clip_norm: 1.0, seed: 0 }
    }
}

impl TrainConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.hidden_size == 0 || self.max_epochs == 0 || self.batch_size == 0 {
            return Err(LstmError::InvalidInput("hidden size, epochs and batch size must be >= 1".into()));
        }
        if !(self.adam.lr > 0.0) || !(self.clip_norm > 0.0) {
            return Err(LstmError::InvalidInput("learning rate and clip norm must be positive".into()));
        }
        Ok(())
    }
}

/// Min/max per feature over every input row, with the target feature's
/// range widened to cover the training targets.
fn fit_scaler(windows: &SupervisedWindows) -> Result<MinMaxScaler> {
    let nf = windows.n_features();
    let rows = windows
        .inputs()
        .view()
        .into_shape_with_order((windows.len() * windows.input_months(), nf))
        .map_err(|e| LstmError::InvalidInput(format!("cannot flatten windows: {e}")))?;
    let base = MinMaxScaler::fit(rows)?;
    let (mut min, mut max) = (base.min().to_vec(), base.max().to_vec());
    let tf = windows.target_feature();
    for v in windows.targets() {
        min[tf] = min[tf].min(*v);
        max[tf] = max[tf].max(*v);
    }
    Ok(MinMaxScaler::from_bounds(min, max)?)
}

/// Fits an LSTM forecaster on `windows`.
///
/// Runs exactly `config.max_epochs` epochs of seeded shuffling and
/// mini-batch Adam on the MAE loss, clipping the global gradient norm before
/// each update.
pub fn train(windows: &SupervisedWindows, config: &TrainConfig, case: CaseSpec) -> Result<LstmModel> {
    config.validate()?;
    if windows.is_empty() {
        return Err(LstmError::InvalidInput("no training windows".into()));
    }
    if windows.input_months() != case.input_months
        || windows.n_features() != case.n_features
        || windows.horizon() != case.horizon
    {
        return Err(LstmError::InvalidInput(format!(
            "windows are {}x{}->{}, case {} expects {}x{}->{}",
            windows.input_months(),
            windows.n_features(),
            windows.horizon(),
            case.id,
            case.input_months,
            case.n_features,
            case.horizon
        )));
    }

    let scaler = fit_scaler(windows)?;
    let tf = windows.target_feature();
    let mut inputs = windows.inputs().clone();
    for (f, mut lane) in inputs.axis_iter_mut(Axis(2)).enumerate() {
        lane.mapv_inplace(|v| scaler.apply_value(f, v));
    }
    let targets = windows.targets().mapv(|v| scaler.apply_value(tf, v));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut network = Network::init(config.hidden_size, case.n_features, case.horizon, &mut rng);
    let sizes: Vec<usize> = network.slices().iter().map(|s| s.len()).collect();
    let mut adam = AdamState::new(&sizes);

    let n = windows.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(config.max_epochs);
    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_total = 0.0;
        for batch in order.chunks(config.batch_size) {
            let x = Array3::from_shape_fn((batch.len(), case.input_months, case.n_features), |(b, t, f)| {
                inputs[[batch[b], t, f]]
            });
            let y = Array2::from_shape_fn((batch.len(), case.horizon), |(b, h)| targets[[batch[b], h]]);
            let cache = network.forward_batch(x.view())?;
            let (loss, d_out) = mae_loss(cache.output().expect("head output").view(), y.view())?;
            if !loss.is_finite() {
                return Err(LstmError::TrainingDiverged { epoch, detail: "non-finite loss".into() });
            }
            epoch_total += loss * batch.len() as f64;
            let mut grads = network.backward(&cache, d_out.view())?;
            clip_global_norm(&mut grads, config.clip_norm);
            adam.step(&mut network.slices_mut(), &grads.slices(), &config.adam).map_err(|e| match e {
                LstmError::TrainingDiverged { detail, .. } => LstmError::TrainingDiverged { epoch, detail },
                other => other,
            })?;
        }
        let epoch_loss = epoch_total / n as f64;
        if !epoch_loss.is_finite() {
            return Err(LstmError::TrainingDiverged { epoch, detail: "non-finite epoch loss".into() });
        }
        history.push(epoch_loss);
    }

    Ok(LstmModel::new(network, scaler, case, *config, history))
}
