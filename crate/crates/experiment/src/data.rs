//! Loading district price files and covariates into aligned tables.

use pricecast_core::io::{read_covariate_csv, read_price_csv, CovariateSeries};
use pricecast_core::{align, AlignedTable, MonthlySeries, YearlySeries};

use crate::config::ExperimentConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct DistrictData {
    pub name: String,
    /// The raw price series as read.
    pub prices: MonthlySeries,
    pub table: AlignedTable,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Covariates {
    pub yearly: Vec<(String, YearlySeries)>,
    pub monthly: Vec<(String, MonthlySeries)>,
}

impl Covariates {
    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        let mut out = Covariates::default();
        for (name, path) in &config.covariates {
            match read_covariate_csv(path)? {
                CovariateSeries::Yearly(y) => out.yearly.push((name.clone(), y)),
                CovariateSeries::Monthly(m) => out.monthly.push((name.clone(), m)),
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.yearly.len() + self.monthly.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn load_district(name: &str, prices: MonthlySeries, covariates: &Covariates) -> Result<DistrictData> {
    let table = align(&prices, &covariates.yearly, &covariates.monthly)?;
    Ok(DistrictData { name: name.to_string(), prices, table })
}

/// Reads and aligns every district in config order.
pub fn load_all(config: &ExperimentConfig) -> Result<Vec<DistrictData>> {
    let covariates = Covariates::load(config)?;
    config.districts.iter().map(|(name, path)| load_district(name, read_price_csv(path)?, &covariates)).collect()
}
