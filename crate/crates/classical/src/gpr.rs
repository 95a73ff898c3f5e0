//! Gaussian process regression with a squared-exponential kernel.
//!
//! k(x, x') = σ_f² exp(-‖x - x'‖² / (2ℓ²)), observed with additive noise σ².
//! Targets are centred on their training mean, so the prior mean is that
//! constant.

use ndarray::{Array2, ArrayView2};
use pricecast_core::{MinMaxScaler, SupervisedWindows};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ClassicalError, Result};
use crate::linalg::{cholesky, cholesky_solve, solve_lower};
use crate::seed::mix;

/// Diagonal jitter tried in order, relative to σ_f², when the kernel matrix
/// will not factor.
const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelHyper {
    pub signal_variance: f64,
    pub length_scale: f64,
    pub noise_variance: f64,
}

impl KernelHyper {
    pub fn new(signal_variance: f64, length_scale: f64, noise_variance: f64) -> Result<Self> {
        let h = Self { signal_variance, length_scale, noise_variance };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.signal_variance.is_finite()
            && self.signal_variance > 0.0
            && self.length_scale.is_finite()
            && self.length_scale > 0.0
            && self.noise_variance.is_finite()
            && self.noise_variance >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(ClassicalError::InvalidParameter(format!("bad kernel hyperparameters {self:?}")))
        }
    }

    fn kernel_from_sqdist(&self, d2: f64) -> f64 {
        self.signal_variance * (-d2 / (2.0 * self.length_scale * self.length_scale)).exp()
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn pairwise_sq_dist(x: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = x.nrows();
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..i {
            let v = sq_dist(&rows[i], &rows[j]);
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    d
}

/// Factors K + (σ² + jitter)I, escalating jitter until it succeeds.
fn factor(d2: &Array2<f64>, hyper: &KernelHyper) -> Result<(Array2<f64>, f64)> {
    let n = d2.nrows();
    let mut k = d2.mapv(|v| hyper.kernel_from_sqdist(v));
    for rel in JITTER_LADDER {
        let jitter = rel * hyper.signal_variance;
        for i in 0..n {
            k[[i, i]] = hyper.signal_variance + hyper.noise_variance + jitter;
        }
        if let Some(l) = cholesky(k.view()) {
            return Ok((l, jitter));
        }
    }
    Err(ClassicalError::IllConditionedKernel(format!(
        "Cholesky failed for {hyper:?} even with jitter {:e}",
        JITTER_LADDER[JITTER_LADDER.len() - 1] * hyper.signal_variance
    )))
}

fn lml_from_factor(l: &Array2<f64>, centred: &[f64]) -> f64 {
    let n = centred.len() as f64;
    let alpha = cholesky_solve(l, centred);
    let fit: f64 = centred.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    let log_det: f64 = l.diag().iter().map(|v| v.ln()).sum();
    -0.5 * fit - log_det - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
}

fn centre(y: &[f64]) -> (f64, Vec<f64>) {
    let m = y.iter().sum::<f64>() / y.len() as f64;
    (m, y.iter().map(|v| v - m).collect())
}

fn check_xy(x: ArrayView2<'_, f64>, y: &[f64]) -> Result<()> {
    if x.nrows() == 0 || x.nrows() != y.len() {
        return Err(ClassicalError::InvalidInput(format!(
            "GPR needs matching non-empty inputs: {} rows vs {} targets",
            x.nrows(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(ClassicalError::InvalidInput("GPR inputs must be finite".into()));
    }
    Ok(())
}

/// Log marginal likelihood of the centred targets under `hyper`.
pub fn log_marginal_likelihood(x: ArrayView2<'_, f64>, y: &[f64], hyper: &KernelHyper) -> Result<f64> {
    check_xy(x, y)?;
    hyper.validate()?;
    let (l, _) = factor(&pairwise_sq_dist(x), hyper)?;
    Ok(lml_from_factor(&l, &centre(y).1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GprModelRepr", into = "GprModelRepr")]
pub struct GprModel {
    x: Array2<f64>,
    y: Vec<f64>,
    y_mean: f64,
    hyper: KernelHyper,
    jitter: f64,
    chol: Array2<f64>,
    alpha: Vec<f64>,
}

/// Only the training data and hyperparameters are stored; the factorisation
/// is recomputed on load, which is deterministic.
#[derive(Serialize, Deserialize)]
struct GprModelRepr {
    x: Array2<f64>,
    y: Vec<f64>,
    hyper: KernelHyper,
}

impl From<GprModel> for GprModelRepr {
    fn from(m: GprModel) -> Self {
        Self { x: m.x, y: m.y, hyper: m.hyper }
    }
}

impl TryFrom<GprModelRepr> for GprModel {
    type Error = ClassicalError;
    fn try_from(r: GprModelRepr) -> Result<Self> {
        gpr_fit(r.x.view(), &r.y, r.hyper)
    }
}

pub fn gpr_fit(x: ArrayView2<'_, f64>, y: &[f64], hyper: KernelHyper) -> Result<GprModel> {
    check_xy(x, y)?;
    hyper.validate()?;
    let (chol, jitter) = factor(&pairwise_sq_dist(x), &hyper)?;
    let (y_mean, centred) = centre(y);
    let alpha = cholesky_solve(&chol, &centred);
    Ok(GprModel { x: x.to_owned(), y: y.to_vec(), y_mean, hyper, jitter, chol, alpha })
}

impl GprModel {
    pub fn hyper(&self) -> &KernelHyper {
        &self.hyper
    }

    /// Diagonal jitter that was needed for the factorisation to succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn n_inputs(&self) -> usize {
        self.x.ncols()
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        lml_from_factor(&self.chol, &centre(&self.y).1)
    }

    /// Posterior mean and latent-function variance at each row of `xs`.
    pub fn predict(&self, xs: ArrayView2<'_, f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        if xs.ncols() != self.x.ncols() {
            return Err(ClassicalError::InvalidInput(format!(
                "query has {} columns, model was trained on {}",
                xs.ncols(),
                self.x.ncols()
            )));
        }
        let train: Vec<Vec<f64>> = self.x.rows().into_iter().map(|r| r.to_vec()).collect();
        let mut mean = Vec::with_capacity(xs.nrows());
        let mut var = Vec::with_capacity(xs.nrows());
        for q in xs.rows() {
            let q = q.to_vec();
            let ks: Vec<f64> = train.iter().map(|t| self.hyper.kernel_from_sqdist(sq_dist(t, &q))).collect();
            mean.push(self.y_mean + ks.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>());
            let v = solve_lower(&self.chol, &ks);
            let explained: f64 = v.iter().map(|a| a * a).sum();
            var.push((self.hyper.signal_variance - explained).max(0.0));
        }
        Ok((mean, var))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GprGrid {
    /// `points` log-spaced values per hyperparameter, scaled to the data:
    /// ℓ spans median pairwise distance × 2^[-3, 3], σ_f² spans
    /// var(y) × 10^[-2, 1] and σ² spans var(y) × 10^[-4, 0].
    DataScaled {
        points: usize,
    },
    Explicit(Vec<KernelHyper>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GprSearch {
    pub grid: GprGrid,
    /// Seeded random-walk steps in log space from the best grid point.
    pub refine_iters: usize,
    pub seed: u64,
}

impl Default for GprSearch {
    fn default() -> Self {
        Self { grid: GprGrid::DataScaled { points: 7 }, refine_iters: 8, seed: 0 }
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo.ln() / 2.0 + hi.ln() / 2.0).exp()];
    }
    (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

impl GprSearch {
    fn candidates(&self, d2: &Array2<f64>, ys: &[Vec<f64>]) -> Result<Vec<KernelHyper>> {
        match &self.grid {
            GprGrid::Explicit(c) => {
                if c.is_empty() {
                    return Err(ClassicalError::InvalidParameter("empty hyperparameter grid".into()));
                }
                c.iter().try_for_each(KernelHyper::validate)?;
                Ok(c.clone())
            }
            GprGrid::DataScaled { points } => {
                if *points == 0 {
                    return Err(ClassicalError::InvalidParameter("grid needs at least one point".into()));
                }
                let n = d2.nrows();
                let dists: Vec<f64> =
                    (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| d2[[i, j]].sqrt()).collect();
                let m = median(dists);
                let m = if m > 0.0 { m } else { 1.0 };
                let pooled: Vec<f64> = ys.iter().flat_map(|y| centre(y).1).collect();
                let v = pooled.iter().map(|a| a * a).sum::<f64>() / pooled.len() as f64;
                let v = if v > 0.0 { v } else { 1.0 };
                let ls = log_space(m / 8.0, m * 8.0, *points);
                let sf = log_space(v * 1e-2, v * 10.0, *points);
                let sn = log_space(v * 1e-4, v, *points);
                let mut out = Vec::with_capacity(points.pow(3));
                for &length_scale in &ls {
                    for &signal_variance in &sf {
                        for &noise_variance in &sn {
                            out.push(KernelHyper { signal_variance, length_scale, noise_variance });
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Maximises the log marginal likelihood of `y` over the search grid.
pub fn gpr_optimize(x: ArrayView2<'_, f64>, y: &[f64], search: &GprSearch) -> Result<KernelHyper> {
    Ok(gpr_optimize_many(x, std::slice::from_ref(&y.to_vec()), search)?[0])
}

/// Independent searches for several target vectors sharing one input
/// matrix. Each grid candidate is factored once and scored against every
/// target; the refinement walk runs per target.
pub fn gpr_optimize_many(x: ArrayView2<'_, f64>, ys: &[Vec<f64>], search: &GprSearch) -> Result<Vec<KernelHyper>> {
    if ys.is_empty() {
        return Err(ClassicalError::InvalidInput("no targets".into()));
    }
    for y in ys {
        check_xy(x, y)?;
    }
    if x.nrows() < 2 {
        return Err(ClassicalError::InsufficientData { needed: 2, available: x.nrows() });
    }
    let d2 = pairwise_sq_dist(x);
    let centred: Vec<Vec<f64>> = ys.iter().map(|y| centre(y).1).collect();
    let candidates = search.candidates(&d2, ys)?;
    let scores: Vec<Option<Vec<f64>>> = candidates
        .par_iter()
        .map(|h| factor(&d2, h).ok().map(|(l, _)| centred.iter().map(|y| lml_from_factor(&l, y)).collect()))
        .collect();

    let mut out = Vec::with_capacity(ys.len());
    for (t, y) in centred.iter().enumerate() {
        let mut best: Option<(f64, KernelHyper)> = None;
        for (h, s) in candidates.iter().zip(&scores) {
            if let Some(s) = s {
                if s[t].is_finite() && best.is_none_or(|(b, _)| s[t] > b) {
                    best = Some((s[t], *h));
                }
            }
        }
        let Some((mut best_score, mut best_hyper)) = best else {
            return Err(ClassicalError::OptimizationFailed(format!(
                "all {} candidates were ill-conditioned",
                candidates.len()
            )));
        };
        if search.refine_iters > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(search.seed, t as u64));
            let step = Normal::<f64>::new(0.0, 0.35).expect("valid sigma");
            for _ in 0..search.refine_iters {
                let p = KernelHyper {
                    signal_variance: best_hyper.signal_variance * step.sample(&mut rng).exp(),
                    length_scale: best_hyper.length_scale * step.sample(&mut rng).exp(),
                    noise_variance: best_hyper.noise_variance * step.sample(&mut rng).exp(),
                };
                if let Ok((l, _)) = factor(&d2, &p) {
                    let s = lml_from_factor(&l, y);
                    if s.is_finite() && s > best_score {
                        best_score = s;
                        best_hyper = p;
                    }
                }
            }
        }
        out.push(best_hyper);
    }
    Ok(out)
}

/// Direct multi-horizon GPR over flattened, min-max scaled input windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GprForecasterRepr", into = "GprForecasterRepr")]
pub struct GprForecaster {
    scaler: MinMaxScaler,
    models: Vec<GprModel>,
}

/// The per-step models share one input matrix, so it is stored once.
#[derive(Serialize, Deserialize)]
struct GprForecasterRepr {
    scaler: MinMaxScaler,
    x: Array2<f64>,
    targets: Vec<Vec<f64>>,
    hypers: Vec<KernelHyper>,
}

impl From<GprForecaster> for GprForecasterRepr {
    fn from(f: GprForecaster) -> Self {
        let x = f.models.first().map(|m| m.x.clone()).unwrap_or_else(|| Array2::zeros((0, 0)));
        Self {
            scaler: f.scaler,
            x,
            targets: f.models.iter().map(|m| m.y.clone()).collect(),
            hypers: f.models.iter().map(|m| m.hyper).collect(),
        }
    }
}

impl TryFrom<GprForecasterRepr> for GprForecaster {
    type Error = ClassicalError;
    fn try_from(r: GprForecasterRepr) -> Result<Self> {
        if r.targets.len() != r.hypers.len() || r.targets.is_empty() {
            return Err(ClassicalError::InvalidInput("GPR forecaster needs one hyperparameter set per target".into()));
        }
        let models = r.targets.iter().zip(&r.hypers).map(|(y, h)| gpr_fit(r.x.view(), y, *h)).collect::<Result<_>>()?;
        Ok(Self { scaler: r.scaler, models })
    }
}

impl GprForecaster {
    pub fn fit(windows: &SupervisedWindows, search: &GprSearch) -> Result<Self> {
        if windows.is_empty() {
            return Err(ClassicalError::InvalidInput("no training windows".into()));
        }
        let width = windows.input_months() * windows.n_features();
        let flat: Vec<f64> = (0..windows.len()).flat_map(|k| windows.flat_row(k)).collect();
        let raw = Array2::from_shape_vec((windows.len(), width), flat).expect("window rows are uniform");
        let scaler = MinMaxScaler::fit(raw.view())?;
        let x = scaler.apply(raw.view())?;
        let ys: Vec<Vec<f64>> = (0..windows.horizon()).map(|h| windows.targets().column(h).to_vec()).collect();
        let hypers = gpr_optimize_many(x.view(), &ys, search)?;
        let models =
            ys.par_iter().zip(hypers.par_iter()).map(|(y, h)| gpr_fit(x.view(), y, *h)).collect::<Result<Vec<_>>>()?;
        Ok(Self { scaler, models })
    }

    pub fn models(&self) -> &[GprModel] {
        &self.models
    }

    pub fn horizon(&self) -> usize {
        self.models.len()
    }

    /// Posterior means for one `input_months × n_features` window.
    pub fn predict(&self, window: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let row: Vec<f64> = window.iter().copied().collect();
        if row.len() != self.scaler.n_columns() {
            return Err(ClassicalError::InvalidInput(format!(
                "expected {} window values, got {}",
                self.scaler.n_columns(),
                row.len()
            )));
        }
        let raw = Array2::from_shape_vec((1, row.len()), row).expect("one row");
        let x = self.scaler.apply(raw.view())?;
        self.models.iter().map(|m| Ok(m.predict(x.view())?.0[0])).collect()
    }
}
