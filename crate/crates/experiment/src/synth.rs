//! Synthetic district prices and covariates shaped like the 1991-2018
//! wheat data: an S-shaped rise that levels off in the final years, an
//! annual harvest cycle and AR(1) noise, all on the log scale.

use std::fs::File;
use std::path::Path;

use pricecast_core::io::{write_monthly_csv, write_yearly_csv};
use pricecast_core::{MonthlySeries, YearMonth, YearlySeries};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::ExperimentConfig;
use crate::error::{ExperimentError, Result};

pub const START_YEAR: i32 = 1991;
pub const MIN_YEARS: usize = 5;
/// Seed used by `synth` when none is given.
pub const DEFAULT_SEED: u64 = 7;
pub const DISTRICTS: [&str; 3] = ["Faisalabad", "Gujranwala", "Multan"];

/// Log-price offsets by calendar month: dearest before the April harvest,
/// cheapest just after it.
const SEASONAL: [f64; 12] = [0.020, 0.028, 0.030, -0.010, -0.040, -0.035, -0.020, -0.010, 0.000, 0.008, 0.012, 0.017];

const RAINFALL_MM: [f64; 12] = [20.0, 30.0, 35.0, 25.0, 15.0, 30.0, 150.0, 140.0, 60.0, 10.0, 5.0, 12.0];
const TEMPERATURE_C: [f64; 12] = [12.0, 15.0, 20.0, 26.0, 31.0, 34.0, 32.0, 31.0, 29.0, 25.0, 19.0, 14.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceProfile {
    /// Price in the first month.
    pub start_price: f64,
    /// Price level the S-curve settles at.
    pub end_price: f64,
    /// Position of the steepest rise as a fraction of the span.
    pub midpoint: f64,
    /// Width of the rise as a fraction of the span.
    pub width: f64,
    pub seasonal_scale: f64,
    pub noise_phi: f64,
    pub noise_sd: f64,
}

impl Default for PriceProfile {
    fn default() -> Self {
        Self {
            start_price: 250.0,
            end_price: 1300.0,
            midpoint: 0.5,
            width: 0.1,
            seasonal_scale: 0.1,
            noise_phi: 0.3,
            noise_sd: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub districts: Vec<(String, MonthlySeries)>,
    pub yearly: Vec<(String, YearlySeries)>,
    pub monthly: Vec<(String, MonthlySeries)>,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Normalised S-curve on [0, 1] with S(0) = 0 and S(1) = 1.
fn s_curve(u: f64, mid: f64, width: f64) -> f64 {
    let lo = logistic(-mid / width);
    let hi = logistic((1.0 - mid) / width);
    (logistic((u - mid) / width) - lo) / (hi - lo)
}

fn ar1(rng: &mut ChaCha8Rng, n: usize, phi: f64, sd: f64) -> Vec<f64> {
    let normal = Normal::new(0.0, sd).expect("finite sd");
    let mut x = Vec::with_capacity(n);
    // Start from the stationary distribution.
    let mut prev = normal.sample(rng) / (1.0 - phi * phi).sqrt();
    for _ in 0..n {
        x.push(prev);
        prev = phi * prev + normal.sample(rng);
    }
    x
}

fn district_prices(rng: &mut ChaCha8Rng, n: usize, profile: &PriceProfile, scale: f64, shift: f64) -> Vec<f64> {
    let noise = ar1(rng, n, profile.noise_phi, profile.noise_sd);
    let rise = (profile.end_price / profile.start_price).ln();
    (0..n)
        .map(|t| {
            let u = t as f64 / (n - 1) as f64;
            let trend = profile.start_price.ln() + rise * s_curve(u, profile.midpoint + shift, profile.width);
            (trend + profile.seasonal_scale * SEASONAL[t % 12] + noise[t]).exp() * scale
        })
        .collect()
}

pub fn generate_synthetic_dataset(seed: u64, n_years: usize) -> Result<SyntheticDataset> {
    generate_with_profile(seed, n_years, &PriceProfile::default())
}

pub fn generate_with_profile(seed: u64, n_years: usize, profile: &PriceProfile) -> Result<SyntheticDataset> {
    if n_years < MIN_YEARS {
        return Err(ExperimentError::InvalidParameter(format!("n_years must be >= {MIN_YEARS}, got {n_years}")));
    }
    let n = n_years * 12;
    let start = YearMonth::new(START_YEAR, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");

    let shape = [(1.00, 0.0), (1.04, 0.01), (0.96, -0.01)];
    let mut districts = Vec::new();
    for (name, (scale, shift)) in DISTRICTS.iter().zip(shape) {
        let prices = district_prices(&mut rng, n, profile, scale, shift);
        districts.push((name.to_string(), MonthlySeries::new(start, prices, "price")?));
    }

    // Consumption follows population: smooth exponential growth with a
    // small seasonal swing.
    let consumption: Vec<f64> = (0..n)
        .map(|t| {
            1.2 * (0.022 * t as f64 / 12.0).exp()
                * (1.0 + 0.02 * SEASONAL[t % 12] / 0.04)
                * (1.0 + 0.01 * unit.sample(&mut rng))
        })
        .collect();
    let province: Vec<f64> =
        (0..n_years).map(|y| 13.0 * (0.018 * y as f64).exp() * (1.0 + 0.05 * unit.sample(&mut rng))).collect();
    let national: Vec<f64> =
        (0..n_years).map(|y| 16.5 * (0.018 * y as f64).exp() * (1.0 + 0.04 * unit.sample(&mut rng))).collect();
    let rainfall: Vec<f64> = (0..n).map(|t| RAINFALL_MM[t % 12] * (0.4 * unit.sample(&mut rng)).exp()).collect();
    let temperature: Vec<f64> =
        (0..n).map(|t| TEMPERATURE_C[t % 12] + 0.02 * t as f64 / 12.0 + unit.sample(&mut rng)).collect();

    Ok(SyntheticDataset {
        districts,
        yearly: vec![
            ("province_production".into(), YearlySeries::new(START_YEAR, province)?),
            ("national_production".into(), YearlySeries::new(START_YEAR, national)?),
        ],
        monthly: vec![
            ("domestic_consumption".into(), MonthlySeries::new(start, consumption, "value")?),
            ("rainfall".into(), MonthlySeries::new(start, rainfall, "value")?),
            ("average_temperature".into(), MonthlySeries::new(start, temperature, "value")?),
        ],
    })
}

impl SyntheticDataset {
    /// Writes one CSV per district and covariate plus `pricecast.cfg`
    /// referencing them, and returns that config.
    pub fn write_to(&self, dir: &Path, seed: u64) -> Result<ExperimentConfig> {
        std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
        let create = |name: &str| {
            let path = dir.join(name);
            File::create(&path).map_err(|e| ExperimentError::io(&path, e))
        };
        let mut cfg = ExperimentConfig { seed, out: dir.join("results"), ..ExperimentConfig::default() };
        for (name, series) in &self.districts {
            let file = format!("{}.csv", name.to_ascii_lowercase());
            write_monthly_csv(create(&file)?, series, "price")?;
            cfg.districts.push((name.clone(), dir.join(file)));
        }
        for (name, series) in &self.monthly {
            let file = format!("{name}.csv");
            write_monthly_csv(create(&file)?, series, "value")?;
            cfg.covariates.push((name.clone(), dir.join(file)));
        }
        for (name, series) in &self.yearly {
            let file = format!("{name}.csv");
            write_yearly_csv(create(&file)?, series)?;
            cfg.covariates.push((name.clone(), dir.join(file)));
        }
        let cfg_path = dir.join("pricecast.cfg");
        std::fs::write(&cfg_path, cfg.to_text()).map_err(|e| ExperimentError::io(&cfg_path, e))?;
        Ok(cfg)
    }
}
