use ndarray::{Array2, Array3, ArrayView2, ArrayView3, Axis};
use pricecast_core::{CaseSpec, MinMaxScaler};
use serde::{Deserialize, Serialize};

use crate::error::{LstmError, Result};
use crate::params::Network;
use crate::train::TrainConfig;

/// A trained forecaster: network, scaler fitted on the training windows,
/// the case it was trained for, its training config and per-epoch loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmModel {
    network: Network,
    scaler: MinMaxScaler,
    case: CaseSpec,
    config: TrainConfig,
    loss_history: Vec<f64>,
}

impl LstmModel {
    pub fn new(
        network: Network,
        scaler: MinMaxScaler,
        case: CaseSpec,
        config: TrainConfig,
        loss_history: Vec<f64>,
    ) -> Self {
        Self { network, scaler, case, config, loss_history }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn scaler(&self) -> &MinMaxScaler {
        &self.scaler
    }

    pub fn case(&self) -> CaseSpec {
        self.case
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }

    /// Checks internal consistency, e.g. after deserialising.
    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if self.scaler.n_columns() != self.network.lstm.n_features()
            || self.case.n_features != self.network.lstm.n_features()
            || self.case.horizon != self.network.head.horizon()
        {
            return Err(LstmError::InvalidState("scaler, case and network shapes disagree".into()));
        }
        Ok(())
    }

    fn scale(&self, windows: ArrayView3<'_, f64>) -> Result<Array3<f64>> {
        let (_, t, f) = windows.dim();
        if t != self.case.input_months || f != self.case.n_features {
            return Err(LstmError::InvalidInput(format!(
                "window is {t}x{f}, model expects {}x{}",
                self.case.input_months, self.case.n_features
            )));
        }
        let mut scaled = windows.to_owned();
        for (j, mut lane) in scaled.axis_iter_mut(Axis(2)).enumerate() {
            lane.mapv_inplace(|v| self.scaler.apply_value(j, v));
        }
        Ok(scaled)
    }

    /// Dense-head outputs on the scaled target axis, `B × horizon`.
    pub fn predict_scaled_batch(&self, windows: ArrayView3<'_, f64>) -> Result<Array2<f64>> {
        let scaled = self.scale(windows)?;
        let cache = self.network.forward_batch(scaled.view())?;
        Ok(cache.output().expect("head output").to_owned())
    }

    /// Forecasts in price units, one row per window.
    pub fn predict_batch(&self, windows: ArrayView3<'_, f64>) -> Result<Array2<f64>> {
        let tf = self.case.n_features - 1;
        Ok(self.predict_scaled_batch(windows)?.mapv(|v| self.scaler.invert_value(tf, v)))
    }

    /// Forecast of the next `horizon` months for one `input_months × n_features` window.
    pub fn predict(&self, window: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        Ok(self.predict_batch(window.insert_axis(Axis(0)))?.row(0).to_vec())
    }
}
