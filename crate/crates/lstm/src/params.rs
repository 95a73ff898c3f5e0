use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LstmError, Result};

/// Gate blocks inside the stacked weight matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Output = 2,
    Candidate = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Output, Gate::Candidate];
}

/// Recurrent layer weights.
///
/// `w` is `4H × F` (input weights), `u` is `4H × H` (recurrent weights) and
/// `b` is `4H`; rows `k*H..(k+1)*H` belong to gate `k` of [`Gate::ALL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub w: Array2<f64>,
    pub u: Array2<f64>,
    pub b: Array1<f64>,
}

impl LstmParams {
    pub fn zeros(hidden: usize, n_features: usize) -> Self {
        Self {
            w: Array2::zeros((4 * hidden, n_features)),
            u: Array2::zeros((4 * hidden, hidden)),
            b: Array1::zeros(4 * hidden),
        }
    }

    /// Uniform weights in ±1/sqrt(hidden), zero biases except the forget
    /// gate, which starts at 1.
    pub fn init<R: Rng>(hidden: usize, n_features: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        let mut p = Self::zeros(hidden, n_features);
        p.w.mapv_inplace(|_| rng.random_range(-bound..bound));
        p.u.mapv_inplace(|_| rng.random_range(-bound..bound));
        p.b.slice_mut(s![hidden..2 * hidden]).fill(1.0);
        p
    }

    pub fn hidden_size(&self) -> usize {
        self.u.ncols()
    }

    pub fn n_features(&self) -> usize {
        self.w.ncols()
    }

    pub fn input_weights(&self, gate: Gate) -> ArrayView2<'_, f64> {
        let h = self.hidden_size();
        let k = gate as usize;
        self.w.slice(s![k * h..(k + 1) * h, ..])
    }

    pub fn recurrent_weights(&self, gate: Gate) -> ArrayView2<'_, f64> {
        let h = self.hidden_size();
        let k = gate as usize;
        self.u.slice(s![k * h..(k + 1) * h, ..])
    }

    pub fn bias(&self, gate: Gate) -> ArrayView1<'_, f64> {
        let h = self.hidden_size();
        let k = gate as usize;
        self.b.slice(s![k * h..(k + 1) * h])
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.hidden_size();
        if h == 0 || self.w.nrows() != 4 * h || self.u.nrows() != 4 * h || self.b.len() != 4 * h {
            return Err(LstmError::InvalidInput("inconsistent LSTM parameter shapes".into()));
        }
        if self.w.iter().chain(self.u.iter()).chain(self.b.iter()).any(|v| !v.is_finite()) {
            return Err(LstmError::InvalidInput("non-finite LSTM parameter".into()));
        }
        Ok(())
    }
}

/// Fully connected output layer with a rectifier: `relu(W h + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseHead {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl DenseHead {
    pub fn zeros(horizon: usize, hidden: usize) -> Self {
        Self { w: Array2::zeros((horizon, hidden)), b: Array1::zeros(horizon) }
    }

    /// Weights uniform in ±1/√hidden. The bias starts at 0.5, the middle of
    /// the scaled target range, so the rectifier is active from the start;
    /// at zero a bad draw can leave every output clamped with no gradient.
    pub fn init<R: Rng>(horizon: usize, hidden: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        let mut head = Self::zeros(horizon, hidden);
        head.w.mapv_inplace(|_| rng.random_range(-bound..bound));
        head.b.fill(0.5);
        head
    }

    pub fn horizon(&self) -> usize {
        self.w.nrows()
    }
}

/// The trainable part of the forecaster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub lstm: LstmParams,
    pub head: DenseHead,
}

impl Network {
    pub fn init<R: Rng>(hidden: usize, n_features: usize, horizon: usize, rng: &mut R) -> Self {
        let lstm = LstmParams::init(hidden, n_features, rng);
        let head = DenseHead::init(horizon, hidden, rng);
        Self { lstm, head }
    }

    pub fn validate(&self) -> Result<()> {
        self.lstm.validate()?;
        if self.head.w.ncols() != self.lstm.hidden_size() || self.head.b.len() != self.head.horizon() {
            return Err(LstmError::InvalidInput("dense head does not match hidden size".into()));
        }
        Ok(())
    }

    /// Parameter tensors as flat slices, in a fixed order shared with
    /// [`crate::NetworkGrads::slices`].
    pub fn slices_mut(&mut self) -> [&mut [f64]; 5] {
        [
            self.lstm.w.as_slice_mut().expect("standard layout"),
            self.lstm.u.as_slice_mut().expect("standard layout"),
            self.lstm.b.as_slice_mut().expect("standard layout"),
            self.head.w.as_slice_mut().expect("standard layout"),
            self.head.b.as_slice_mut().expect("standard layout"),
        ]
    }

    pub fn slices(&self) -> [&[f64]; 5] {
        [
            self.lstm.w.as_slice().expect("standard layout"),
            self.lstm.u.as_slice().expect("standard layout"),
            self.lstm.b.as_slice().expect("standard layout"),
            self.head.w.as_slice().expect("standard layout"),
            self.head.b.as_slice().expect("standard layout"),
        ]
    }
}
