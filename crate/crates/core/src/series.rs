use serde::{Deserialize, Serialize};

use crate::calendar::YearMonth;
use crate::error::{Error, Result};

/// A gap-free run of monthly observations starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlySeries {
    start: YearMonth,
    values: Vec<f64>,
    unit: String,
}

impl MonthlySeries {
    pub fn new(start: YearMonth, values: Vec<f64>, unit: impl Into<String>) -> Result<Self> {
        check_values(&values)?;
        Ok(Self { start, values, unit: unit.into() })
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    /// Last month covered (inclusive).
    pub fn end(&self) -> YearMonth {
        self.start.add_months(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date_at(&self, i: usize) -> YearMonth {
        self.start.add_months(i as i64)
    }

    /// Sub-series covering `from..=to`, both of which must lie inside the series.
    pub fn slice(&self, from: YearMonth, to: YearMonth) -> Result<Self> {
        let a = self.start.months_until(from);
        let b = self.start.months_until(to);
        if a < 0 || b < a || b >= self.values.len() as i64 {
            return Err(Error::invalid_input(format!(
                "range {from}..={to} is not inside {}..={}",
                self.start,
                self.end()
            )));
        }
        Ok(Self { start: from, values: self.values[a as usize..=b as usize].to_vec(), unit: self.unit.clone() })
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// One observation per calendar year starting at `start_year`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlySeries {
    start_year: i32,
    values: Vec<f64>,
}

impl YearlySeries {
    pub fn new(start_year: i32, values: Vec<f64>) -> Result<Self> {
        check_values(&values)?;
        Ok(Self { start_year, values })
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid_input("series must be non-empty"));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid_input(format!("non-finite value at position {i}")));
    }
    Ok(())
}
