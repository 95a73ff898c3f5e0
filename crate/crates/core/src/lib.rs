//! Core time-series machinery for monthly commodity price forecasting.
//!
//! This crate holds everything the forecasting models share: the calendar
//! index, gap-free monthly and yearly series, the moving-average filter,
//! yearly-to-monthly interpolation, correlation, min-max scaling, error
//! metrics, and the [`dataset`] module that aligns covariates, splits
//! chronologically and builds sliding-window supervised datasets.

pub mod calendar;
pub mod dataset;
pub mod error;
pub mod interpolate;
pub mod io;
pub mod metrics;
pub mod scaler;
pub mod series;
pub mod smoothing;
pub mod stats;

pub use calendar::YearMonth;
pub use dataset::{
    align, build_windows, canonical_cases, split_train_test, AlignedTable, CaseSpec, SplitSpec, SupervisedWindows,
};
pub use error::{Error, Result};
pub use interpolate::interpolate_yearly_to_monthly;
pub use metrics::{mae, mape, rmse};
pub use scaler::MinMaxScaler;
pub use series::{MonthlySeries, YearlySeries};
pub use smoothing::moving_average_filter;
pub use stats::pearson_correlation;
