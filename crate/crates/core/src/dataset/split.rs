use serde::{Deserialize, Serialize};

use super::table::AlignedTable;
use crate::calendar::YearMonth;
use crate::error::{Error, Result};

/// Chronological split: everything up to and including `train_end` trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_end: YearMonth,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train_end: YearMonth::new(2015, 12).expect("valid month") }
    }
}

pub fn split_train_test(table: &AlignedTable, spec: SplitSpec) -> Result<(AlignedTable, AlignedTable)> {
    if spec.train_end < table.start() || spec.train_end >= table.end() {
        return Err(Error::InvalidParameter(format!(
            "train end {} must lie in {}..{} so both splits are non-empty",
            spec.train_end,
            table.start(),
            table.end()
        )));
    }
    let train = table.slice(table.start(), spec.train_end)?;
    let test = table.slice(spec.train_end.add_months(1), table.end())?;
    Ok((train, test))
}
