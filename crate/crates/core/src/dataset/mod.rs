//! Feature alignment, chronological splitting and sliding-window datasets.

mod split;
mod table;
mod windows;

pub use split::{split_train_test, SplitSpec};
pub use table::{align, AlignedTable, Column, COVARIATE_ORDER, TARGET_NAME};
pub use windows::{build_windows, canonical_cases, latest_window, CaseSpec, SupervisedWindows};
