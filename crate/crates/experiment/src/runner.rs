//! Evaluation cells and the full grid.
//!
//! Each cell splits the aligned table chronologically, optionally smooths
//! the target of each split on its own, windows both splits, fits on the
//! training windows and scores every test window against the raw prices.

use std::time::{Duration, Instant};

use pricecast_core::dataset::latest_window;
use pricecast_core::smoothing::moving_average;
use pricecast_core::{
    build_windows, mape, rmse, split_train_test, AlignedTable, CaseSpec, SupervisedWindows, YearMonth,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ModelKind, Preprocessing};
use crate::data::DistrictData;
use crate::error::{ExperimentError, Result};
use crate::models::{FittedModel, ModelFile, MODEL_FORMAT, MODEL_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellSpec {
    pub district: String,
    pub case_id: u8,
    pub model: ModelKind,
    pub preprocessing: Preprocessing,
}

impl CellSpec {
    pub fn new(district: impl Into<String>, case_id: u8, model: ModelKind, preprocessing: Preprocessing) -> Self {
        Self { district: district.into(), case_id, model, preprocessing }
    }

    /// File-system friendly identifier.
    pub fn id(&self) -> String {
        format!("{}_case{}_{}_{}", self.district, self.case_id, self.model, self.preprocessing)
    }

    /// Seed for this cell, independent of which other cells run.
    pub fn seed(&self, base: u64) -> u64 {
        // FNV-1a over the cell identity, then a splitmix64 finaliser.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.id().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        let mut z = base ^ h;
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

impl std::fmt::Display for CellSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} case {} {} {}", self.district, self.case_id, self.model, self.preprocessing)
    }
}

/// Every requested cell in canonical (district, case, model, preprocessing)
/// order. Districts keep config order; the other axes are sorted.
pub fn grid_cells(config: &ExperimentConfig) -> Vec<CellSpec> {
    let mut cases = config.cases.clone();
    cases.sort_unstable();
    cases.dedup();
    let mut models = config.models.clone();
    models.sort_unstable();
    models.dedup();
    let mut preps = config.preprocessing.clone();
    preps.sort_unstable();
    preps.dedup();
    let mut out = Vec::new();
    for (district, _) in &config.districts {
        for &c in &cases {
            for &m in &models {
                for &p in &preps {
                    out.push(CellSpec::new(district.clone(), c, m, p));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRow {
    pub date: YearMonth,
    pub actual: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub district: String,
    pub case_id: u8,
    pub model: ModelKind,
    pub preprocessing: Preprocessing,
    pub status: CellStatus,
    pub rmse: Option<f64>,
    pub mape: Option<f64>,
    pub n_predictions: usize,
    pub features_used: usize,
    pub hyperparameters: String,
    pub seed: u64,
    pub duration: Duration,
    pub predictions: Vec<PredictionRow>,
}

impl RunResult {
    pub fn spec(&self) -> CellSpec {
        CellSpec::new(self.district.clone(), self.case_id, self.model, self.preprocessing)
    }

    pub fn is_ok(&self) -> bool {
        self.status == CellStatus::Ok
    }

    fn failed(spec: &CellSpec, seed: u64, err: &ExperimentError, duration: Duration) -> Self {
        Self {
            district: spec.district.clone(),
            case_id: spec.case_id,
            model: spec.model,
            preprocessing: spec.preprocessing,
            status: CellStatus::Failed(err.to_string()),
            rmse: None,
            mape: None,
            n_predictions: 0,
            features_used: 0,
            hyperparameters: String::new(),
            seed,
            duration,
            predictions: Vec::new(),
        }
    }
}

/// Training and test windows for one cell, plus the raw test targets.
#[derive(Debug, Clone)]
pub struct PreparedCell {
    pub train: SupervisedWindows,
    pub test: SupervisedWindows,
    /// Raw (unsmoothed) targets aligned with `test`.
    pub actual: SupervisedWindows,
}

fn smooth_target(table: &AlignedTable, window: usize) -> Result<AlignedTable> {
    Ok(table.with_target(moving_average(table.target(), window)?)?)
}

pub fn prepare_cell(
    table: &AlignedTable,
    case: CaseSpec,
    preprocessing: Preprocessing,
    config: &ExperimentConfig,
) -> Result<PreparedCell> {
    let (train, test) = split_train_test(table, config.split)?;
    let actual = build_windows(&test, case)?;
    let (train, test) = match preprocessing {
        Preprocessing::Raw => (train, test),
        Preprocessing::Smooth => {
            (smooth_target(&train, config.smooth_window)?, smooth_target(&test, config.smooth_window)?)
        }
    };
    Ok(PreparedCell { train: build_windows(&train, case)?, test: build_windows(&test, case)?, actual })
}

/// Fits the cell's model on training windows only.
pub fn fit_cell(
    config: &ExperimentConfig,
    data: &DistrictData,
    spec: &CellSpec,
) -> Result<(FittedModel, PreparedCell)> {
    let case = CaseSpec::by_id(spec.case_id)?;
    let prepared = prepare_cell(&data.table, case, spec.preprocessing, config)?;
    let model = FittedModel::fit(spec.model, &prepared.train, case, spec.seed(config.seed))?;
    Ok((model, prepared))
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub result: RunResult,
    pub model: Option<ModelFile>,
}

fn evaluate(config: &ExperimentConfig, data: &DistrictData, spec: &CellSpec) -> Result<(RunResult, ModelFile)> {
    let started = Instant::now();
    let case = CaseSpec::by_id(spec.case_id)?;
    let seed = spec.seed(config.seed);
    let (model, prepared) = fit_cell(config, data, spec)?;
    let mut predictions = Vec::new();
    for k in 0..prepared.test.len() {
        let forecast = model.predict(prepared.test.window(k))?;
        let dates = prepared.actual.target_dates(k);
        for ((date, actual), predicted) in dates.into_iter().zip(prepared.actual.targets().row(k)).zip(forecast) {
            predictions.push(PredictionRow { date, actual: *actual, predicted });
        }
    }
    let actual: Vec<f64> = predictions.iter().map(|p| p.actual).collect();
    let predicted: Vec<f64> = predictions.iter().map(|p| p.predicted).collect();
    let result = RunResult {
        district: spec.district.clone(),
        case_id: spec.case_id,
        model: spec.model,
        preprocessing: spec.preprocessing,
        status: CellStatus::Ok,
        rmse: Some(rmse(&actual, &predicted)?),
        mape: Some(mape(&actual, &predicted)?),
        n_predictions: predictions.len(),
        features_used: model.features_used(case),
        hyperparameters: model.describe(),
        seed,
        duration: started.elapsed(),
        predictions,
    };
    let file = ModelFile {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        district: spec.district.clone(),
        case,
        preprocessing: spec.preprocessing,
        smooth_window: config.smooth_window,
        seed,
        feature_names: prepared.train.feature_names().to_vec(),
        trained_through: config.split.train_end,
        model,
    };
    Ok((result, file))
}

/// Runs one cell; errors carry the cell identity.
pub fn run_cell(config: &ExperimentConfig, data: &DistrictData, spec: &CellSpec) -> Result<CellOutcome> {
    if data.name != spec.district {
        return Err(ExperimentError::InvalidParameter(format!("cell {spec} given data for {}", data.name)));
    }
    evaluate(config, data, spec)
        .map(|(result, file)| CellOutcome { result, model: Some(file) })
        .map_err(|e| ExperimentError::Cell { cell: spec.to_string(), source: Box::new(e) })
}

/// Forecasts the months after the end of `table` with a saved model. The
/// table is prepared the way the model's cell was: with smoothing, the part
/// after the training cutoff is smoothed separately from the rest.
pub fn forecast_next(file: &ModelFile, table: &AlignedTable) -> Result<Vec<(YearMonth, f64)>> {
    let view = if file.case.uses_covariates() { table.clone() } else { table.target_only() };
    let names = view.feature_names();
    if names != file.feature_names {
        return Err(ExperimentError::InvalidParameter(format!(
            "model expects features [{}], data has [{}]",
            file.feature_names.join(", "),
            names.join(", ")
        )));
    }
    let prepared = match file.preprocessing {
        Preprocessing::Raw => view,
        Preprocessing::Smooth if view.start() <= file.trained_through && file.trained_through < view.end() => {
            let (train, rest) = split_train_test(&view, pricecast_core::SplitSpec { train_end: file.trained_through })?;
            smooth_target(&train, file.smooth_window)?.concat(&smooth_target(&rest, file.smooth_window)?)?
        }
        Preprocessing::Smooth => smooth_target(&view, file.smooth_window)?,
    };
    let window = latest_window(&prepared, file.case)?;
    let values = file.model.predict(window.view())?;
    let end = prepared.end();
    Ok(values.into_iter().enumerate().map(|(i, v)| (end.add_months(i as i64 + 1), v)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<RunResult>,
}

impl ResultsTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True when every row succeeded.
    pub fn is_complete(&self) -> bool {
        self.rows.iter().all(RunResult::is_ok)
    }

    pub fn get(
        &self,
        district: &str,
        case_id: u8,
        model: ModelKind,
        preprocessing: Preprocessing,
    ) -> Option<&RunResult> {
        self.rows.iter().find(|r| {
            r.district == district && r.case_id == case_id && r.model == model && r.preprocessing == preprocessing
        })
    }
}

/// Runs every requested cell, concurrently up to `config.workers`. Failed
/// cells are recorded in their row; rows come back in canonical order.
pub fn run_grid(config: &ExperimentConfig, data: &[DistrictData]) -> Result<Vec<CellOutcome>> {
    config.validate()?;
    let cells = grid_cells(config);
    for spec in &cells {
        if !data.iter().any(|d| d.name == spec.district) {
            return Err(ExperimentError::InvalidParameter(format!("no data loaded for district {}", spec.district)));
        }
    }
    let work = || {
        cells
            .par_iter()
            .map(|spec| {
                let district = data.iter().find(|d| d.name == spec.district).expect("checked above");
                let started = Instant::now();
                run_cell(config, district, spec).unwrap_or_else(|e| CellOutcome {
                    result: RunResult::failed(spec, spec.seed(config.seed), &e, started.elapsed()),
                    model: None,
                })
            })
            .collect::<Vec<_>>()
    };
    match config.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ExperimentError::InvalidParameter(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

pub fn results_table(outcomes: &[CellOutcome]) -> ResultsTable {
    ResultsTable { rows: outcomes.iter().map(|o| o.result.clone()).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_seeds_are_stable_and_distinct() {
        let a = CellSpec::new("A", 1, ModelKind::Lstm, Preprocessing::Raw);
        let b = CellSpec::new("A", 1, ModelKind::Lstm, Preprocessing::Smooth);
        assert_eq!(a.seed(7), a.clone().seed(7));
        assert_ne!(a.seed(7), b.seed(7));
        assert_ne!(a.seed(7), a.seed(8));
    }

    #[test]
    fn grid_is_canonical_and_complete() {
        let mut cfg = ExperimentConfig::default();
        cfg.districts = ["F", "G", "M"].iter().map(|d| (d.to_string(), d.into())).collect();
        cfg.models = vec![ModelKind::Lstm, ModelKind::Arima, ModelKind::Gpr, ModelKind::BaggedTrees];
        cfg.cases = vec![4, 3, 2, 1];
        let cells = grid_cells(&cfg);
        assert_eq!(cells.len(), 96);
        assert_eq!(cells[0], CellSpec::new("F", 1, ModelKind::BaggedTrees, Preprocessing::Raw));
        assert_eq!(cells[95], CellSpec::new("M", 4, ModelKind::Lstm, Preprocessing::Smooth));
        let unique: std::collections::HashSet<_> = cells.iter().collect();
        assert_eq!(unique.len(), 96);
        cfg.models = vec![ModelKind::Lstm];
        assert_eq!(grid_cells(&cfg).len(), 24);
    }
}
