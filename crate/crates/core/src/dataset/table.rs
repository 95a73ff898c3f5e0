use std::collections::HashSet;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::calendar::YearMonth;
use crate::error::{Error, Result};
use crate::interpolate::interpolate_yearly_to_monthly;
use crate::series::{MonthlySeries, YearlySeries};

/// Name of the target column; it is always the last feature.
pub const TARGET_NAME: &str = "price";

/// Canonical covariate order. Names outside this list sort after it,
/// alphabetically.
pub const COVARIATE_ORDER: [&str; 6] = [
    "domestic_consumption",
    "growth_rate",
    "province_production",
    "national_production",
    "rainfall",
    "average_temperature",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Target prices plus covariate columns on one shared monthly index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedTable {
    start: YearMonth,
    target: Vec<f64>,
    covariates: Vec<Column>,
}

impl AlignedTable {
    pub fn new(start: YearMonth, target: Vec<f64>, covariates: Vec<Column>) -> Result<Self> {
        if target.is_empty() {
            return Err(Error::invalid_input("aligned table must have at least one row"));
        }
        let mut seen = HashSet::new();
        for c in &covariates {
            if c.values.len() != target.len() {
                return Err(Error::invalid_input(format!(
                    "covariate {} has {} rows, target has {}",
                    c.name,
                    c.values.len(),
                    target.len()
                )));
            }
            if c.name == TARGET_NAME || !seen.insert(c.name.as_str()) {
                return Err(Error::invalid_input(format!("duplicate column name {}", c.name)));
            }
        }
        Ok(Self { start, target, covariates })
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    pub fn end(&self) -> YearMonth {
        self.start.add_months(self.target.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    pub fn date_at(&self, row: usize) -> YearMonth {
        self.start.add_months(row as i64)
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn target_series(&self) -> MonthlySeries {
        MonthlySeries::new(self.start, self.target.clone(), "").expect("table rows are finite and non-empty")
    }

    pub fn covariates(&self) -> &[Column] {
        &self.covariates
    }

    /// Covariates plus the target.
    pub fn n_features(&self) -> usize {
        self.covariates.len() + 1
    }

    /// Feature names in column order, target last.
    pub fn feature_names(&self) -> Vec<String> {
        self.covariates.iter().map(|c| c.name.clone()).chain([TARGET_NAME.to_string()]).collect()
    }

    /// Value at `row` of feature `f` in [`Self::feature_names`] order.
    pub fn feature(&self, row: usize, f: usize) -> f64 {
        if f == self.covariates.len() {
            self.target[row]
        } else {
            self.covariates[f].values[row]
        }
    }

    /// Rows × features matrix, target in the last column.
    pub fn feature_matrix(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.len(), self.n_features()), |(r, f)| self.feature(r, f))
    }

    /// Same index and covariates with the target replaced.
    pub fn with_target(&self, target: Vec<f64>) -> Result<Self> {
        if target.len() != self.target.len() {
            return Err(Error::invalid_input("replacement target must keep the row count"));
        }
        Self::new(self.start, target, self.covariates.clone())
    }

    /// Rows `from..=to`.
    pub fn slice(&self, from: YearMonth, to: YearMonth) -> Result<Self> {
        let a = self.start.months_until(from);
        let b = self.start.months_until(to);
        if a < 0 || b < a || b >= self.len() as i64 {
            return Err(Error::invalid_input(format!(
                "range {from}..={to} is not inside {}..={}",
                self.start,
                self.end()
            )));
        }
        let (a, b) = (a as usize, b as usize + 1);
        Ok(Self {
            start: from,
            target: self.target[a..b].to_vec(),
            covariates: self
                .covariates
                .iter()
                .map(|c| Column { name: c.name.clone(), values: c.values[a..b].to_vec() })
                .collect(),
        })
    }

    /// Appends `next`, which must start the month after `self` ends and
    /// carry the same columns.
    pub fn concat(&self, next: &AlignedTable) -> Result<Self> {
        if next.start != self.end().add_months(1) || next.feature_names() != self.feature_names() {
            return Err(Error::invalid_input("tables are not contiguous with matching columns"));
        }
        let mut out = self.clone();
        out.target.extend_from_slice(&next.target);
        for (c, n) in out.covariates.iter_mut().zip(&next.covariates) {
            c.values.extend_from_slice(&n.values);
        }
        Ok(out)
    }

    /// Drops all covariates.
    pub fn target_only(&self) -> Self {
        Self { start: self.start, target: self.target.clone(), covariates: Vec::new() }
    }
}

fn order_key(name: &str) -> (usize, &str) {
    let rank = COVARIATE_ORDER.iter().position(|n| *n == name).unwrap_or(COVARIATE_ORDER.len());
    (rank, name)
}

/// Puts the target and covariates on one monthly index.
///
/// Yearly covariates are interpolated to months first. Every column is then
/// trimmed to the months all inputs cover.
pub fn align(
    target: &MonthlySeries,
    yearly: &[(String, YearlySeries)],
    monthly: &[(String, MonthlySeries)],
) -> Result<AlignedTable> {
    let mut columns: Vec<(String, MonthlySeries)> = Vec::with_capacity(yearly.len() + monthly.len());
    for (name, y) in yearly {
        columns.push((name.clone(), interpolate_yearly_to_monthly(y)?));
    }
    columns.extend(monthly.iter().cloned());

    let mut seen = HashSet::new();
    for (name, _) in &columns {
        if name == TARGET_NAME || !seen.insert(name.as_str()) {
            return Err(Error::invalid_input(format!("duplicate covariate name {name}")));
        }
    }

    let from = columns.iter().map(|(_, s)| s.start()).fold(target.start(), Ord::max);
    let to = columns.iter().map(|(_, s)| s.end()).fold(target.end(), Ord::min);
    if to < from {
        return Err(Error::invalid_input("inputs share no common months"));
    }

    columns.sort_by(|(a, _), (b, _)| order_key(a).cmp(&order_key(b)));
    let covariates = columns
        .into_iter()
        .map(|(name, s)| Ok(Column { name, values: s.slice(from, to)?.into_values() }))
        .collect::<Result<Vec<_>>>()?;
    AlignedTable::new(from, target.slice(from, to)?.into_values(), covariates)
}
