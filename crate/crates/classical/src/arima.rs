//! ARIMA(p, d, q) estimated by conditional sum of squares.
//!
//! On the d-times differenced series w the model is
//! w_t = μ + Σ φ_i (w_{t-i} - μ) + e_t + Σ θ_j e_{t-j},
//! with innovations before the conditioning start taken as zero.

use pricecast_core::SupervisedWindows;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ClassicalError, Result};
use crate::optim::NelderMead;

/// Extra observations required beyond p + q after differencing.
const MIN_EXTRA_OBS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q }
    }
}

impl std::fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    order: ArimaOrder,
    ar: Vec<f64>,
    ma: Vec<f64>,
    /// Mean of the differenced series.
    mean: f64,
    sigma2: f64,
    css: f64,
    n_residuals: usize,
    /// Last p values of the differenced series.
    diff_tail: Vec<f64>,
    /// Last q training residuals.
    resid_tail: Vec<f64>,
    /// Last value of the series at each differencing level 0..d.
    anchors: Vec<f64>,
}

pub(crate) fn difference(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Series at differencing levels 0..=d.
fn levels(series: &[f64], d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![series.to_vec()];
    for _ in 0..d {
        let next = difference(out.last().expect("non-empty"));
        out.push(next);
    }
    out
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
}

/// True when all roots of 1 - a_1 z - ... - a_k z^k lie outside the unit
/// circle (Schur-Cohn step-down recursion).
pub(crate) fn is_stable(a: &[f64]) -> bool {
    let mut a = a.to_vec();
    while let Some(&kappa) = a.last() {
        if !kappa.is_finite() || kappa.abs() >= 1.0 {
            return false;
        }
        let k = a.len();
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..k - 1).map(|j| (a[j] + kappa * a[k - 2 - j]) / denom).collect();
        a = prev;
    }
    true
}

/// Residuals for t in `start..n` (zero before `start`) and their sum of
/// squares.
fn residuals(w: &[f64], mean: f64, ar: &[f64], ma: &[f64], start: usize) -> (Vec<f64>, f64) {
    let n = w.len();
    let mut e = vec![0.0; n];
    let mut css = 0.0;
    for t in start..n {
        let mut v = w[t] - mean;
        for (i, phi) in ar.iter().enumerate() {
            v -= phi * (w[t - 1 - i] - mean);
        }
        for (j, theta) in ma.iter().enumerate() {
            if t > j {
                v -= theta * e[t - 1 - j];
            }
        }
        e[t] = v;
        css += v * v;
    }
    (e, css)
}

struct CssFit {
    mean: f64,
    ar: Vec<f64>,
    ma: Vec<f64>,
}

/// Minimises CSS for fixed (p, q) on the differenced series `w`, with
/// residuals counted from `start`.
fn fit_css(w: &[f64], p: usize, q: usize, start: usize) -> Result<CssFit> {
    let n = w.len() as f64;
    let m0 = w.iter().sum::<f64>() / n;
    let sd = sample_variance(w).sqrt();
    let sd = if sd > 0.0 { sd } else { 1.0 };
    // Work on the standardised series; coefficients are scale-free.
    let z: Vec<f64> = w.iter().map(|v| (v - m0) / sd).collect();
    let objective = |x: &[f64]| {
        let (ar, ma) = x[1..].split_at(p);
        if !is_stable(ar) {
            return f64::INFINITY;
        }
        let neg_ma: Vec<f64> = ma.iter().map(|t| -t).collect();
        if !is_stable(&neg_ma) {
            return f64::INFINITY;
        }
        residuals(&z, x[0], ar, ma, start).1
    };
    let dim = 1 + p + q;
    let x0 = vec![0.0; dim];
    let step = vec![0.1; dim];
    let nm = NelderMead::default();
    let mut r = nm.minimize(objective, &x0, &step);
    // Restart from the optimum to escape a collapsed simplex.
    for _ in 0..2 {
        let again = nm.minimize(objective, &r.x, &step);
        let done = again.f >= r.f - 1e-12 * r.f.abs();
        r = if again.f <= r.f { again } else { r };
        if done {
            break;
        }
    }
    if !r.converged || !r.f.is_finite() {
        return Err(ClassicalError::FitFailed(format!(
            "ARIMA({p},·,{q}) CSS did not converge after {} iterations (objective {:.6e}, params {:?})",
            r.iterations, r.f, r.x
        )));
    }
    Ok(CssFit { mean: m0 + sd * r.x[0], ar: r.x[1..=p].to_vec(), ma: r.x[p + 1..].to_vec() })
}

fn check_length(series: &[f64], order: ArimaOrder) -> Result<()> {
    if series.iter().any(|v| !v.is_finite()) {
        return Err(ClassicalError::InvalidInput("series contains non-finite values".into()));
    }
    let needed = order.d + order.p + order.q + MIN_EXTRA_OBS;
    if series.len() < needed {
        return Err(ClassicalError::InsufficientData { needed, available: series.len() });
    }
    Ok(())
}

fn fit_with_start(series: &[f64], order: ArimaOrder, start: usize) -> Result<ArimaModel> {
    if order.d > 2 {
        return Err(ClassicalError::InvalidParameter(format!("d must be 0, 1 or 2, got {}", order.d)));
    }
    check_length(series, order)?;
    let lv = levels(series, order.d);
    let w = lv.last().expect("level d");
    let fit = if order.p == 0 && order.q == 0 {
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        CssFit { mean, ar: vec![], ma: vec![] }
    } else {
        fit_css(w, order.p, order.q, start)?
    };
    let (e, css) = residuals(w, fit.mean, &fit.ar, &fit.ma, start);
    let n_residuals = w.len() - start;
    Ok(ArimaModel {
        order,
        sigma2: css / n_residuals as f64,
        css,
        n_residuals,
        diff_tail: w[w.len() - order.p..].to_vec(),
        resid_tail: e[e.len() - order.q..].to_vec(),
        anchors: lv[..order.d].iter().map(|l| *l.last().expect("non-empty level")).collect(),
        ar: fit.ar,
        ma: fit.ma,
        mean: fit.mean,
    })
}

/// Fits `order` by CSS, conditioning on the first p differenced values.
pub fn arima_fit(series: &[f64], order: ArimaOrder) -> Result<ArimaModel> {
    fit_with_start(series, order, order.p)
}

impl ArimaModel {
    pub fn order(&self) -> ArimaOrder {
        self.order
    }

    pub fn ar(&self) -> &[f64] {
        &self.ar
    }

    pub fn ma(&self) -> &[f64] {
        &self.ma
    }

    /// Mean of the differenced series.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Constant term c in w_t = c + Σ φ_i w_{t-i} + ...
    pub fn intercept(&self) -> f64 {
        self.mean * (1.0 - self.ar.iter().sum::<f64>())
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn css(&self) -> f64 {
        self.css
    }

    pub fn n_residuals(&self) -> usize {
        self.n_residuals
    }

    pub fn n_params(&self) -> usize {
        self.order.p + self.order.q + 1
    }

    pub fn aic(&self) -> f64 {
        let n = self.n_residuals as f64;
        n * (self.css / n).ln() + 2.0 * self.n_params() as f64
    }

    /// Training residuals of `series` under the fitted coefficients.
    pub fn residuals(&self, series: &[f64]) -> Result<Vec<f64>> {
        check_length(series, self.order)?;
        let lv = levels(series, self.order.d);
        let w = lv.last().expect("level d");
        Ok(residuals(w, self.mean, &self.ar, &self.ma, self.order.p).0[self.order.p..].to_vec())
    }

    /// `h` forecasts following the training series.
    pub fn forecast(&self, h: usize) -> Result<Vec<f64>> {
        self.project(&self.diff_tail, &self.resid_tail, &self.anchors, h)
    }

    /// `h` forecasts following `history`, using the fitted coefficients and
    /// re-running the residual recursion over `history`.
    pub fn forecast_from(&self, history: &[f64], h: usize) -> Result<Vec<f64>> {
        let needed = self.order.d + self.order.p + self.order.q.max(1);
        if history.len() < needed {
            return Err(ClassicalError::InsufficientData { needed, available: history.len() });
        }
        if history.iter().any(|v| !v.is_finite()) {
            return Err(ClassicalError::InvalidInput("history contains non-finite values".into()));
        }
        let lv = levels(history, self.order.d);
        let w = lv.last().expect("level d");
        let (e, _) = residuals(w, self.mean, &self.ar, &self.ma, self.order.p);
        let anchors: Vec<f64> = lv[..self.order.d].iter().map(|l| *l.last().expect("non-empty")).collect();
        self.project(&w[w.len() - self.order.p..], &e[e.len() - self.order.q..], &anchors, h)
    }

    fn project(&self, w_tail: &[f64], e_tail: &[f64], anchors: &[f64], h: usize) -> Result<Vec<f64>> {
        if h == 0 {
            return Err(ClassicalError::InvalidParameter("forecast horizon must be >= 1".into()));
        }
        let (p, q) = (self.order.p, self.order.q);
        let mut w: Vec<f64> = w_tail.to_vec();
        let mut e: Vec<f64> = e_tail.to_vec();
        let mut out = Vec::with_capacity(h);
        for _ in 0..h {
            let mut v = self.mean;
            for i in 0..p {
                v += self.ar[i] * (w[w.len() - 1 - i] - self.mean);
            }
            for j in 0..q {
                v += self.ma[j] * e[e.len() - 1 - j];
            }
            w.push(v);
            e.push(0.0);
            out.push(v);
        }
        // Integrate back up through each differencing level.
        for anchor in anchors.iter().rev() {
            let mut level = *anchor;
            for v in out.iter_mut() {
                level += *v;
                *v = level;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderSearch {
    pub p_max: usize,
    pub q_max: usize,
    pub d_max: usize,
    /// Difference again while var(Δx) < variance_ratio · var(x).
    pub variance_ratio: f64,
}

impl Default for OrderSearch {
    fn default() -> Self {
        Self { p_max: 3, q_max: 3, d_max: 2, variance_ratio: 0.5 }
    }
}

impl OrderSearch {
    /// Smallest d whose differenced series no longer loses enough variance
    /// by differencing once more.
    pub fn select_d(&self, series: &[f64]) -> usize {
        let mut d = 0;
        let mut cur = series.to_vec();
        while d < self.d_max.min(2) && cur.len() > 2 {
            let next = difference(&cur);
            if sample_variance(&next) < self.variance_ratio * sample_variance(&cur) {
                d += 1;
                cur = next;
            } else {
                break;
            }
        }
        d
    }
}

/// Lower AIC wins; exact ties go to smaller p + q, then smaller p.
fn prefer(candidate: (f64, usize, usize), incumbent: (f64, usize, usize)) -> bool {
    let (a, p, q) = candidate;
    let (ba, bp, bq) = incumbent;
    a < ba || (a == ba && (p + q, p) < (bp + bq, bp))
}

/// Chooses (p, d, q) by AIC. Every (p, q) candidate conditions on the same
/// first `p_max` observations so their AICs share one sample.
pub fn arima_select_order(series: &[f64], search: &OrderSearch) -> Result<ArimaOrder> {
    let d = search.select_d(series);
    let needed = d + search.p_max + search.q_max + MIN_EXTRA_OBS;
    if series.len() < needed {
        return Err(ClassicalError::InsufficientData { needed, available: series.len() });
    }
    let grid: Vec<(usize, usize)> = (0..=search.p_max).flat_map(|p| (0..=search.q_max).map(move |q| (p, q))).collect();
    let fits: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&(p, q)| fit_with_start(series, ArimaOrder::new(p, d, q), search.p_max).ok().map(|m| m.aic()))
        .collect();
    let mut best: Option<(f64, usize, usize)> = None;
    for (&(p, q), aic) in grid.iter().zip(&fits) {
        let Some(aic) = aic.filter(|a| a.is_finite()) else { continue };
        if best.is_none_or(|b| prefer((aic, p, q), b)) {
            best = Some((aic, p, q));
        }
    }
    best.map(|(_, p, q)| ArimaOrder::new(p, d, q))
        .ok_or_else(|| ClassicalError::SelectionFailed(format!("no (p,q) candidate fitted at d = {d}")))
}

/// Univariate ARIMA forecaster over the target column of a window set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaForecaster {
    model: ArimaModel,
    horizon: usize,
}

impl ArimaForecaster {
    /// Selects an order on the contiguous training target series and fits it.
    pub fn fit(windows: &SupervisedWindows, search: &OrderSearch) -> Result<Self> {
        if windows.is_empty() {
            return Err(ClassicalError::InvalidInput("no training windows".into()));
        }
        let series = windows.target_series();
        let order = arima_select_order(&series, search)?;
        Ok(Self { model: arima_fit(&series, order)?, horizon: windows.horizon() })
    }

    pub fn model(&self) -> &ArimaModel {
        &self.model
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Forecast continuing `history`, the target values observed up to the
    /// forecast origin (typically one input window's target column).
    pub fn predict(&self, history: &[f64]) -> Result<Vec<f64>> {
        self.model.forecast_from(history, self.horizon)
    }
}
