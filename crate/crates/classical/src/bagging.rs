//! Bootstrap-aggregated regression trees, one ensemble per horizon step.

use ndarray::{Array2, ArrayView2};
use pricecast_core::SupervisedWindows;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ClassicalError, Result};
use crate::seed::mix;
use crate::tree::{tree_fit_rows, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaggingConfig {
    pub n_trees: usize,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// When false every tree sees the full training set.
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for BaggingConfig {
    fn default() -> Self {
        Self { n_trees: 30, min_leaf: 5, max_depth: None, bootstrap: true, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggedTreesModel {
    config: BaggingConfig,
    n_inputs: usize,
    /// `ensembles[h]` predicts horizon step `h`.
    ensembles: Vec<Vec<TreeNode>>,
}

impl BaggedTreesModel {
    /// Fits on flattened input windows.
    pub fn fit(windows: &SupervisedWindows, config: &BaggingConfig) -> Result<Self> {
        if windows.is_empty() {
            return Err(ClassicalError::InvalidInput("no training windows".into()));
        }
        let width = windows.input_months() * windows.n_features();
        let flat: Vec<f64> = (0..windows.len()).flat_map(|k| windows.flat_row(k)).collect();
        let x = Array2::from_shape_vec((windows.len(), width), flat).expect("window rows are uniform");
        let targets: Vec<Vec<f64>> = (0..windows.horizon()).map(|h| windows.targets().column(h).to_vec()).collect();
        Self::fit_matrix(x.view(), &targets, config)
    }

    /// Fits one ensemble per target vector in `targets`.
    pub fn fit_matrix(x: ArrayView2<'_, f64>, targets: &[Vec<f64>], config: &BaggingConfig) -> Result<Self> {
        if config.n_trees == 0 {
            return Err(ClassicalError::InvalidParameter("n_trees must be >= 1".into()));
        }
        let n = x.nrows();
        if n == 0 || targets.is_empty() || targets.iter().any(|t| t.len() != n) {
            return Err(ClassicalError::InvalidInput("bagging needs a non-empty X with matching targets".into()));
        }
        let jobs: Vec<(usize, usize)> =
            (0..targets.len()).flat_map(|h| (0..config.n_trees).map(move |k| (h, k))).collect();
        let trees = jobs
            .par_iter()
            .map(|&(h, k)| {
                let rows: Vec<usize> = if config.bootstrap {
                    let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, (h * config.n_trees + k) as u64));
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                tree_fit_rows(x, &targets[h], &rows, config.min_leaf.min(n), config.max_depth)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut it = trees.into_iter();
        let ensembles = (0..targets.len()).map(|_| it.by_ref().take(config.n_trees).collect()).collect();
        Ok(Self { config: *config, n_inputs: x.ncols(), ensembles })
    }

    pub fn config(&self) -> &BaggingConfig {
        &self.config
    }

    pub fn horizon(&self) -> usize {
        self.ensembles.len()
    }

    pub fn trees(&self, step: usize) -> &[TreeNode] {
        &self.ensembles[step]
    }

    /// Mean tree prediction per horizon step for one flattened input row.
    pub fn predict_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_inputs {
            return Err(ClassicalError::InvalidInput(format!("expected {} inputs, got {}", self.n_inputs, row.len())));
        }
        Ok(self
            .ensembles
            .iter()
            .map(|trees| trees.iter().map(|t| t.predict(row)).sum::<f64>() / trees.len() as f64)
            .collect())
    }

    /// Forecast for one `input_months × n_features` window.
    pub fn predict(&self, window: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let row: Vec<f64> = window.iter().copied().collect();
        self.predict_row(&row)
    }
}
