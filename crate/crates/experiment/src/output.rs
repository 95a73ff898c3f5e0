//! Result files: `results.csv`, per-cell `predictions.csv`, model files and
//! `timings.csv`.
//!
//! `results.csv` columns:
//! `district,case,model,preprocessing,status,rmse,mape,n_predictions,features_used,seed,hyperparameters,error`.
//! Wall-clock durations vary between runs, so they live in `timings.csv`
//! and `results.csv` stays byte-identical for a fixed config and seed.

use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::config::{ModelKind, Preprocessing};
use crate::error::{ExperimentError, Result};
use crate::runner::{CellOutcome, CellStatus, PredictionRow, ResultsTable, RunResult};

pub const RESULTS_HEADER: [&str; 12] = [
    "district",
    "case",
    "model",
    "preprocessing",
    "status",
    "rmse",
    "mape",
    "n_predictions",
    "features_used",
    "seed",
    "hyperparameters",
    "error",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_results_csv(path: &Path, table: &ResultsTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| ExperimentError::csv(path, e))?;
    w.write_record(RESULTS_HEADER).map_err(|e| ExperimentError::csv(path, e))?;
    for r in &table.rows {
        let (status, error) = match &r.status {
            CellStatus::Ok => ("ok", String::new()),
            CellStatus::Failed(msg) => ("failed", msg.clone()),
        };
        w.write_record([
            r.district.clone(),
            r.case_id.to_string(),
            r.model.to_string(),
            r.preprocessing.to_string(),
            status.to_string(),
            opt(r.rmse),
            opt(r.mape),
            r.n_predictions.to_string(),
            r.features_used.to_string(),
            r.seed.to_string(),
            r.hyperparameters.clone(),
            error,
        ])
        .map_err(|e| ExperimentError::csv(path, e))?;
    }
    w.flush().map_err(|e| ExperimentError::io(path, e))
}

/// Reads `results.csv` back. Predictions and durations are not part of the
/// file and come back empty.
pub fn read_results_csv(path: &Path) -> Result<ResultsTable> {
    let mut r = csv::Reader::from_path(path).map_err(|e| ExperimentError::csv(path, e))?;
    let headers = r.headers().map_err(|e| ExperimentError::csv(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != RESULTS_HEADER {
        return Err(ExperimentError::Config { path: path.to_path_buf(), message: "unexpected results header".into() });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| ExperimentError::csv(path, e))?;
        let bad = |what: &str| ExperimentError::Config {
            path: path.to_path_buf(),
            message: format!("row {}: bad {what}", i + 2),
        };
        let float = |s: &str, what: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(what))
            }
        };
        let status = match &rec[4] {
            "ok" => CellStatus::Ok,
            "failed" => CellStatus::Failed(rec[11].to_string()),
            _ => return Err(bad("status")),
        };
        rows.push(RunResult {
            district: rec[0].to_string(),
            case_id: rec[1].parse().map_err(|_| bad("case"))?,
            model: rec[2].parse::<ModelKind>().map_err(|_| bad("model"))?,
            preprocessing: rec[3].parse::<Preprocessing>().map_err(|_| bad("preprocessing"))?,
            status,
            rmse: float(&rec[5], "rmse")?,
            mape: float(&rec[6], "mape")?,
            n_predictions: rec[7].parse().map_err(|_| bad("n_predictions"))?,
            features_used: rec[8].parse().map_err(|_| bad("features_used"))?,
            seed: rec[9].parse().map_err(|_| bad("seed"))?,
            hyperparameters: rec[10].to_string(),
            duration: Duration::ZERO,
            predictions: Vec::new(),
        });
    }
    Ok(ResultsTable { rows })
}

pub fn write_predictions_csv(path: &Path, rows: &[PredictionRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| ExperimentError::csv(path, e))?;
    w.write_record(["date", "actual", "predicted"]).map_err(|e| ExperimentError::csv(path, e))?;
    for p in rows {
        w.write_record([p.date.to_string(), p.actual.to_string(), p.predicted.to_string()])
            .map_err(|e| ExperimentError::csv(path, e))?;
    }
    w.flush().map_err(|e| ExperimentError::io(path, e))
}

pub fn read_predictions_csv(path: &Path) -> Result<Vec<PredictionRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| ExperimentError::csv(path, e))?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| ExperimentError::csv(path, e))?;
        let bad = || ExperimentError::Config { path: path.to_path_buf(), message: format!("row {}: malformed", i + 2) };
        if rec.len() != 3 {
            return Err(bad());
        }
        out.push(PredictionRow {
            date: rec[0].parse().map_err(|_| bad())?,
            actual: rec[1].parse().map_err(|_| bad())?,
            predicted: rec[2].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}

pub fn write_timings_csv(path: &Path, table: &ResultsTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| ExperimentError::csv(path, e))?;
    w.write_record(["district", "case", "model", "preprocessing", "seconds"])
        .map_err(|e| ExperimentError::csv(path, e))?;
    for r in &table.rows {
        w.write_record([
            r.district.clone(),
            r.case_id.to_string(),
            r.model.to_string(),
            r.preprocessing.to_string(),
            format!("{:.3}", r.duration.as_secs_f64()),
        ])
        .map_err(|e| ExperimentError::csv(path, e))?;
    }
    w.flush().map_err(|e| ExperimentError::io(path, e))
}

pub fn cell_dir(out: &Path, id: &str) -> PathBuf {
    out.join("cells").join(id)
}

/// Writes results, timings and each cell's predictions and model file.
pub fn write_grid_outputs(out: &Path, outcomes: &[CellOutcome]) -> Result<ResultsTable> {
    std::fs::create_dir_all(out).map_err(|e| ExperimentError::io(out, e))?;
    for o in outcomes {
        let dir = cell_dir(out, &o.result.spec().id());
        std::fs::create_dir_all(&dir).map_err(|e| ExperimentError::io(&dir, e))?;
        if o.result.is_ok() {
            write_predictions_csv(&dir.join("predictions.csv"), &o.result.predictions)?;
        }
        if let Some(m) = &o.model {
            m.save(&dir.join("model.json"))?;
        }
    }
    let table = ResultsTable { rows: outcomes.iter().map(|o| o.result.clone()).collect() };
    write_results_csv(&out.join("results.csv"), &table)?;
    write_timings_csv(&out.join("timings.csv"), &table)?;
    Ok(table)
}
