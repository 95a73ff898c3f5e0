//! Experiment configuration and its `key = value` text format.
//!
//! ```text
//! # paths are relative to this file
//! district.Faisalabad = faisalabad.csv
//! covariate.rainfall = rainfall.csv
//! smooth_window = 10
//! train_end = 2015-12
//! models = bagged_trees,gpr,arima,lstm
//! cases = 1,2,3,4
//! preprocessing = raw,smooth
//! seed = 42
//! out = results
//! workers = 4
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pricecast_core::smoothing::DEFAULT_WINDOW;
use pricecast_core::{SplitSpec, YearMonth};
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    BaggedTrees,
    Gpr,
    Arima,
    Lstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::BaggedTrees, ModelKind::Gpr, ModelKind::Arima, ModelKind::Lstm];

    pub fn key(self) -> &'static str {
        match self {
            ModelKind::BaggedTrees => "bagged_trees",
            ModelKind::Gpr => "gpr",
            ModelKind::Arima => "arima",
            ModelKind::Lstm => "lstm",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::BaggedTrees => "Bagged Trees",
            ModelKind::Gpr => "GPR",
            ModelKind::Arima => "ARIMA",
            ModelKind::Lstm => "LSTM",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ModelKind {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bagged_trees" | "bagged-trees" | "trees" => Ok(ModelKind::BaggedTrees),
            "gpr" => Ok(ModelKind::Gpr),
            "arima" => Ok(ModelKind::Arima),
            "lstm" => Ok(ModelKind::Lstm),
            other => Err(ExperimentError::InvalidParameter(format!(
                "unknown model `{other}` (expected bagged_trees, gpr, arima or lstm)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preprocessing {
    Raw,
    Smooth,
}

impl Preprocessing {
    pub const ALL: [Preprocessing; 2] = [Preprocessing::Raw, Preprocessing::Smooth];

    pub fn key(self) -> &'static str {
        match self {
            Preprocessing::Raw => "raw",
            Preprocessing::Smooth => "smooth",
        }
    }
}

impl fmt::Display for Preprocessing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Preprocessing {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "raw" => Ok(Preprocessing::Raw),
            "smooth" | "smoothed" => Ok(Preprocessing::Smooth),
            other => Err(ExperimentError::InvalidParameter(format!(
                "unknown preprocessing `{other}` (expected raw or smooth)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// District name and price CSV, in report order.
    pub districts: Vec<(String, PathBuf)>,
    pub covariates: Vec<(String, PathBuf)>,
    pub smooth_window: usize,
    pub split: SplitSpec,
    pub models: Vec<ModelKind>,
    pub cases: Vec<u8>,
    pub preprocessing: Vec<Preprocessing>,
    pub seed: u64,
    pub out: PathBuf,
    /// Worker threads for the grid; `None` uses all cores.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            districts: Vec::new(),
            covariates: Vec::new(),
            smooth_window: DEFAULT_WINDOW,
            split: SplitSpec::default(),
            models: ModelKind::ALL.to_vec(),
            cases: vec![1, 2, 3, 4],
            preprocessing: Preprocessing::ALL.to_vec(),
            seed: 0,
            out: PathBuf::from("results"),
            workers: None,
        }
    }
}

pub fn parse_list<T: FromStr<Err = ExperimentError>>(s: &str) -> Result<Vec<T>> {
    let items: Vec<T> = s.split(',').filter(|p| !p.trim().is_empty()).map(T::from_str).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(ExperimentError::InvalidParameter(format!("empty list `{s}`")));
    }
    Ok(items)
}

pub fn parse_cases(s: &str) -> Result<Vec<u8>> {
    let cases = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| match p.trim().parse::<u8>() {
            Ok(c @ 1..=4) => Ok(c),
            _ => Err(ExperimentError::InvalidParameter(format!("unknown case `{}` (expected 1-4)", p.trim()))),
        })
        .collect::<Result<Vec<_>>>()?;
    if cases.is_empty() {
        return Err(ExperimentError::InvalidParameter(format!("empty case list `{s}`")));
    }
    Ok(cases)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            ExperimentError::Config { message, .. } | ExperimentError::InvalidParameter(message) => {
                ExperimentError::Config { path: path.to_path_buf(), message }
            }
            other => other,
        })
    }

    /// Parses the text format; relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = Self { out: base.join("results"), ..Self::default() };
        let resolve = |p: &str| {
            let p = PathBuf::from(p);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err =
                |m: String| ExperimentError::Config { path: PathBuf::new(), message: format!("line {}: {m}", n + 1) };
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(format!("expected `key = value`, got `{line}`")));
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: ExperimentError| err(e.to_string());
            if let Some(name) = key.strip_prefix("district.") {
                if cfg.districts.iter().any(|(d, _)| d == name) {
                    return Err(err(format!("district `{name}` listed twice")));
                }
                cfg.districts.push((name.to_string(), resolve(value)));
                continue;
            }
            if let Some(name) = key.strip_prefix("covariate.") {
                if cfg.covariates.iter().any(|(c, _)| c == name) {
                    return Err(err(format!("covariate `{name}` listed twice")));
                }
                cfg.covariates.push((name.to_string(), resolve(value)));
                continue;
            }
            match key {
                "smooth_window" => {
                    cfg.smooth_window = value
                        .parse()
                        .ok()
                        .filter(|w| *w > 0)
                        .ok_or_else(|| err(format!("bad smooth_window `{value}`")))?
                }
                "train_end" => {
                    cfg.split = SplitSpec { train_end: value.parse::<YearMonth>().map_err(|e| err(e.to_string()))? }
                }
                "models" => cfg.models = parse_list(value).map_err(bad)?,
                "cases" => cfg.cases = parse_cases(value).map_err(bad)?,
                "preprocessing" => cfg.preprocessing = parse_list(value).map_err(bad)?,
                "seed" => cfg.seed = value.parse().map_err(|_| err(format!("bad seed `{value}`")))?,
                "out" => cfg.out = resolve(value),
                "workers" => {
                    cfg.workers = Some(
                        value.parse().ok().filter(|w| *w > 0).ok_or_else(|| err(format!("bad workers `{value}`")))?,
                    )
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    /// Renders the text format with absolute paths.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, path) in &self.districts {
            s.push_str(&format!("district.{name} = {}\n", path.display()));
        }
        for (name, path) in &self.covariates {
            s.push_str(&format!("covariate.{name} = {}\n", path.display()));
        }
        s.push_str(&format!("smooth_window = {}\n", self.smooth_window));
        s.push_str(&format!("train_end = {}\n", self.split.train_end));
        let join = |v: Vec<String>| v.join(",");
        s.push_str(&format!("models = {}\n", join(self.models.iter().map(|m| m.to_string()).collect())));
        s.push_str(&format!("cases = {}\n", join(self.cases.iter().map(|c| c.to_string()).collect())));
        s.push_str(&format!("preprocessing = {}\n", join(self.preprocessing.iter().map(|p| p.to_string()).collect())));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("out = {}\n", self.out.display()));
        if let Some(w) = self.workers {
            s.push_str(&format!("workers = {w}\n"));
        }
        s
    }

    /// Keeps only the named districts, preserving config order.
    pub fn restrict_districts(&mut self, names: &[String]) -> Result<()> {
        for n in names {
            if !self.districts.iter().any(|(d, _)| d == n) {
                return Err(ExperimentError::InvalidParameter(format!("unknown district `{n}`")));
            }
        }
        self.districts.retain(|(d, _)| names.contains(d));
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.districts.is_empty() {
            return Err(ExperimentError::InvalidParameter("config lists no districts".into()));
        }
        if self.models.is_empty() || self.cases.is_empty() || self.preprocessing.is_empty() {
            return Err(ExperimentError::InvalidParameter("empty model, case or preprocessing set".into()));
        }
        if self.smooth_window == 0 {
            return Err(ExperimentError::InvalidParameter("smooth_window must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        let text = "\
# comment
district.Faisalabad = f.csv
district.Multan = /abs/m.csv
covariate.rainfall = r.csv
smooth_window = 6
train_end = 2014-06
models = lstm, arima
cases = 1,3
preprocessing = smooth
seed = 9
workers = 2
";
        let cfg = ExperimentConfig::parse(text, Path::new("/base")).unwrap();
        assert_eq!(cfg.districts[0], ("Faisalabad".into(), PathBuf::from("/base/f.csv")));
        assert_eq!(cfg.districts[1].1, PathBuf::from("/abs/m.csv"));
        assert_eq!(cfg.smooth_window, 6);
        assert_eq!(cfg.split.train_end, YearMonth::new(2014, 6).unwrap());
        assert_eq!(cfg.models, vec![ModelKind::Lstm, ModelKind::Arima]);
        assert_eq!(cfg.cases, vec![1, 3]);
        assert_eq!(cfg.preprocessing, vec![Preprocessing::Smooth]);
        assert_eq!(cfg.workers, Some(2));
        let again = ExperimentConfig::parse(&cfg.to_text(), Path::new("/elsewhere")).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn defaults() {
        let cfg = ExperimentConfig::parse("district.A = a.csv\n", Path::new(".")).unwrap();
        assert_eq!(cfg.smooth_window, 10);
        assert_eq!(cfg.models.len(), 4);
        assert_eq!(cfg.cases, vec![1, 2, 3, 4]);
        assert_eq!(cfg.split.train_end, YearMonth::new(2015, 12).unwrap());
    }

    #[test]
    fn rejects_bad_lines() {
        for bad in
            ["nonsense", "smooth_window = 0", "cases = 5", "models = svm", "color = red", "district.A=a\ndistrict.A=b"]
        {
            assert!(ExperimentConfig::parse(bad, Path::new(".")).is_err(), "{bad}");
        }
    }
}
