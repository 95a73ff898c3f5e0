//! Uniform fit/predict wrapper over the four forecasters, and model files.

use std::path::Path;

use ndarray::ArrayView2;
use pricecast_classical::{ArimaForecaster, BaggedTreesModel, BaggingConfig, GprForecaster, GprSearch, OrderSearch};
use pricecast_core::{CaseSpec, SupervisedWindows, YearMonth};
use pricecast_lstm::{train, LstmModel, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::config::{ModelKind, Preprocessing};
use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum FittedModel {
    BaggedTrees(BaggedTreesModel),
    Gpr(GprForecaster),
    Arima(ArimaForecaster),
    Lstm(LstmModel),
}

impl FittedModel {
    pub fn fit(kind: ModelKind, windows: &SupervisedWindows, case: CaseSpec, seed: u64) -> Result<Self> {
        Ok(match kind {
            ModelKind::BaggedTrees => FittedModel::BaggedTrees(BaggedTreesModel::fit(
                windows,
                &BaggingConfig { seed, ..BaggingConfig::default() },
            )?),
            ModelKind::Gpr => {
                FittedModel::Gpr(GprForecaster::fit(windows, &GprSearch { seed, ..GprSearch::default() })?)
            }
            ModelKind::Arima => FittedModel::Arima(ArimaForecaster::fit(windows, &OrderSearch::default())?),
            ModelKind::Lstm => FittedModel::Lstm(train(windows, &TrainConfig::with_seed(seed), case)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            FittedModel::BaggedTrees(_) => ModelKind::BaggedTrees,
            FittedModel::Gpr(_) => ModelKind::Gpr,
            FittedModel::Arima(_) => ModelKind::Arima,
            FittedModel::Lstm(_) => ModelKind::Lstm,
        }
    }

    /// Forecast for one `input_months × n_features` window whose last column
    /// is the target.
    pub fn predict(&self, window: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        Ok(match self {
            FittedModel::BaggedTrees(m) => m.predict(window)?,
            FittedModel::Gpr(m) => m.predict(window)?,
            FittedModel::Arima(m) => {
                let target: Vec<f64> = window.column(window.ncols() - 1).to_vec();
                m.predict(&target)?
            }
            FittedModel::Lstm(m) => m.predict(window)?,
        })
    }

    /// Number of input features the model actually consumes. ARIMA is
    /// univariate whatever the case asks for.
    pub fn features_used(&self, case: CaseSpec) -> usize {
        match self {
            FittedModel::Arima(_) => 1,
            _ => case.n_features,
        }
    }

    /// Short, deterministic summary of the fitted hyperparameters.
    pub fn describe(&self) -> String {
        match self {
            FittedModel::BaggedTrees(m) => {
                let c = m.config();
                let depth = c.max_depth.map_or("none".to_string(), |d| d.to_string());
                format!("n_trees={} min_leaf={} max_depth={depth}", c.n_trees, c.min_leaf)
            }
            FittedModel::Gpr(m) => m
                .models()
                .iter()
                .map(|g| {
                    let h = g.hyper();
                    format!("l={:.6e} sf2={:.6e} sn2={:.6e}", h.length_scale, h.signal_variance, h.noise_variance)
                })
                .collect::<Vec<_>>()
                .join(" | "),
            FittedModel::Arima(m) => {
                let a = m.model();
                let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(",");
                format!(
                    "order={} ar=[{}] ma=[{}] mean={:.6} sigma2={:.6}",
                    a.order(),
                    fmt(a.ar()),
                    fmt(a.ma()),
                    a.mean(),
                    a.sigma2()
                )
            }
            FittedModel::Lstm(m) => {
                let c = m.config();
                let last = m.loss_history().last().copied().unwrap_or(f64::NAN);
                format!(
                    "hidden={} epochs={} batch={} lr={} final_loss={last:.6e}",
                    c.hidden_size, c.max_epochs, c.batch_size, c.adam.lr
                )
            }
        }
    }
}

pub const MODEL_FORMAT: &str = "pricecast-model";
pub const MODEL_VERSION: u32 = 1;

/// Self-describing model file: the fitted model plus everything needed to
/// rebuild its input window from data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub district: String,
    pub case: CaseSpec,
    pub preprocessing: Preprocessing,
    pub smooth_window: usize,
    pub seed: u64,
    pub feature_names: Vec<String>,
    pub trained_through: YearMonth,
    pub model: FittedModel,
}

impl ModelFile {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)
            .map_err(|e| ExperimentError::ModelFile { path: path.to_path_buf(), message: e.to_string() })?;
        std::fs::write(path, text).map_err(|e| ExperimentError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        let bad = |message: String| ExperimentError::ModelFile { path: path.to_path_buf(), message };
        let header: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        if header.get("format").and_then(|f| f.as_str()) != Some(MODEL_FORMAT) {
            return Err(bad(format!("not a {MODEL_FORMAT} file")));
        }
        match header.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == MODEL_VERSION as u64 => {}
            other => return Err(bad(format!("unsupported version {other:?}, expected {MODEL_VERSION}"))),
        }
        serde_json::from_str(&text).map_err(|e| bad(e.to_string()))
    }
}
