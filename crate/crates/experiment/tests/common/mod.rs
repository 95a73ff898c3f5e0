#![allow(dead_code)]

use pricecast_experiment::data::{load_district, Covariates};
use pricecast_experiment::synth::DEFAULT_SEED;
use pricecast_experiment::{generate_synthetic_dataset, DistrictData, ExperimentConfig, ModelKind};

/// In-memory synthetic districts plus a config naming them.
pub fn synthetic() -> (ExperimentConfig, Vec<DistrictData>) {
    let ds = generate_synthetic_dataset(DEFAULT_SEED, 28).unwrap();
    let cov = Covariates { yearly: ds.yearly.clone(), monthly: ds.monthly.clone() };
    let data: Vec<DistrictData> =
        ds.districts.iter().map(|(n, s)| load_district(n, s.clone(), &cov).unwrap()).collect();
    let cfg = ExperimentConfig {
        districts: data.iter().map(|d| (d.name.clone(), d.name.clone().into())).collect(),
        seed: DEFAULT_SEED,
        ..ExperimentConfig::default()
    };
    (cfg, data)
}

/// Same as [`synthetic`] restricted to one district and a model subset.
pub fn small(models: &[ModelKind]) -> (ExperimentConfig, Vec<DistrictData>) {
    let (mut cfg, mut data) = synthetic();
    data.truncate(1);
    cfg.districts.truncate(1);
    cfg.models = models.to_vec();
    (cfg, data)
}

pub fn rmse_oracle(a: &[f64], p: &[f64]) -> f64 {
    (a.iter().zip(p).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64).sqrt()
}

pub fn mape_oracle(a: &[f64], p: &[f64]) -> f64 {
    100.0 * a.iter().zip(p).map(|(x, y)| ((x - y) / x).abs()).sum::<f64>() / a.len() as f64
}
