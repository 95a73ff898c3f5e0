//! Evaluation grid for the price forecasters: data loading, per-cell runs,
//! result files, reports, SVG charts and a synthetic dataset generator.

pub mod config;
pub mod data;
mod error;
pub mod models;
pub mod output;
pub mod plot;
pub mod report;
pub mod runner;
pub mod synth;

pub use config::{ExperimentConfig, ModelKind, Preprocessing};
pub use data::{load_all, DistrictData};
pub use error::{ExperimentError, Result};
pub use models::{FittedModel, ModelFile};
pub use plot::plot_series;
pub use report::{build_report, report, Report, ReportFormat};
pub use runner::{
    fit_cell, forecast_next, grid_cells, results_table, run_cell, run_grid, CellOutcome, CellSpec, CellStatus,
    PredictionRow, ResultsTable, RunResult,
};
pub use synth::generate_synthetic_dataset;
