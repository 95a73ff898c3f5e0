use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, Array3, ArrayView2, ArrayView3, Axis};

use crate::error::{LstmError, Result};
use crate::params::{LstmParams, Network};

/// Everything the backward pass needs from one forward pass over a batch.
///
/// Per step `t` (1-based), `gates[t-1]` holds the activated
/// `[i | f | o | g]` blocks (`B × 4H`); `cells` and `hiddens` include the
/// zero initial state at index 0.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub(crate) inputs: Array3<f64>,
    pub(crate) gates: Vec<Array2<f64>>,
    pub(crate) cells: Vec<Array2<f64>>,
    pub(crate) tanh_cells: Vec<Array2<f64>>,
    pub(crate) hiddens: Vec<Array2<f64>>,
    pub(crate) head_pre: Option<Array2<f64>>,
    pub(crate) output: Option<Array2<f64>>,
}

impl ForwardCache {
    pub fn batch_size(&self) -> usize {
        self.inputs.dim().0
    }

    pub fn steps(&self) -> usize {
        self.gates.len()
    }

    pub fn hidden_size(&self) -> usize {
        self.hiddens[0].ncols()
    }

    pub fn n_features(&self) -> usize {
        self.inputs.dim().2
    }

    /// Final hidden state, `B × H`.
    pub fn final_hidden(&self) -> ArrayView2<'_, f64> {
        self.hiddens.last().expect("at least the initial state").view()
    }

    /// Activated gate blocks at step `t` (0-based).
    pub fn gates(&self, t: usize) -> ArrayView2<'_, f64> {
        self.gates[t].view()
    }

    /// Cell state after step `t` (0-based).
    pub fn cell(&self, t: usize) -> ArrayView2<'_, f64> {
        self.cells[t + 1].view()
    }

    /// Dense-head output (after the rectifier), `B × horizon`, when the
    /// forward pass included the head.
    pub fn output(&self) -> Option<ArrayView2<'_, f64>> {
        self.output.as_ref().map(|o| o.view())
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl LstmParams {
    /// Runs the recurrence over a batch `B × T × F`, starting from zero
    /// hidden and cell states.
    pub fn forward_batch(&self, inputs: ArrayView3<'_, f64>) -> Result<ForwardCache> {
        let (batch, steps, nf) = inputs.dim();
        if nf != self.n_features() {
            return Err(LstmError::InvalidInput(format!(
                "window has {nf} features, model expects {}",
                self.n_features()
            )));
        }
        if batch == 0 || steps == 0 {
            return Err(LstmError::InvalidInput("empty batch or window".into()));
        }
        let h = self.hidden_size();
        let mut cache = ForwardCache {
            inputs: inputs.to_owned(),
            gates: Vec::with_capacity(steps),
            cells: vec![Array2::zeros((batch, h))],
            tanh_cells: Vec::with_capacity(steps),
            hiddens: vec![Array2::zeros((batch, h))],
            head_pre: None,
            output: None,
        };
        let wt = self.w.t();
        let ut = self.u.t();
        for t in 0..steps {
            let mut z = Array2::from_shape_fn((batch, 4 * h), |(_, j)| self.b[j]);
            general_mat_mul(1.0, &inputs.slice(s![.., t, ..]), &wt, 1.0, &mut z);
            general_mat_mul(1.0, &cache.hiddens[t], &ut, 1.0, &mut z);

            let c_prev = &cache.cells[t];
            let mut c = Array2::zeros((batch, h));
            let mut tc = Array2::zeros((batch, h));
            let mut hid = Array2::zeros((batch, h));
            for r in 0..batch {
                let mut zr = z.row_mut(r);
                for j in 0..h {
                    let i_g = sigmoid(zr[j]);
                    let f_g = sigmoid(zr[h + j]);
                    let o_g = sigmoid(zr[2 * h + j]);
                    let g_g = zr[3 * h + j].tanh();
                    zr[j] = i_g;
                    zr[h + j] = f_g;
                    zr[2 * h + j] = o_g;
                    zr[3 * h + j] = g_g;
                    let cv = f_g * c_prev[[r, j]] + i_g * g_g;
                    let tv = cv.tanh();
                    c[[r, j]] = cv;
                    tc[[r, j]] = tv;
                    hid[[r, j]] = o_g * tv;
                }
            }
            cache.gates.push(z);
            cache.cells.push(c);
            cache.tanh_cells.push(tc);
            cache.hiddens.push(hid);
        }
        Ok(cache)
    }

    /// Single-window forward pass returning the final hidden state.
    pub fn forward(&self, window: ArrayView2<'_, f64>) -> Result<(Array1<f64>, ForwardCache)> {
        let batch = window.insert_axis(Axis(0));
        let cache = self.forward_batch(batch)?;
        let h = cache.final_hidden().row(0).to_owned();
        Ok((h, cache))
    }
}

impl Network {
    /// Recurrence plus dense head; the cache's `output()` holds
    /// `relu(W h_T + b)` for each batch row.
    pub fn forward_batch(&self, inputs: ArrayView3<'_, f64>) -> Result<ForwardCache> {
        let mut cache = self.lstm.forward_batch(inputs)?;
        let batch = cache.batch_size();
        let mut pre = Array2::from_shape_fn((batch, self.head.horizon()), |(_, k)| self.head.b[k]);
        general_mat_mul(1.0, &cache.final_hidden(), &self.head.w.t(), 1.0, &mut pre);
        cache.output = Some(pre.mapv(|v| v.max(0.0)));
        cache.head_pre = Some(pre);
        Ok(cache)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{DenseHead, Gate};
    use ndarray::array;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_weights_give_zero_hidden() {
        let p = LstmParams::zeros(4, 2);
        let window = Array2::from_elem((6, 2), 3.7);
        let (h, _) = p.forward(window.view()).unwrap();
        assert!(h.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_step_hand_evaluation() {
        // hidden 2, one feature, one step with x = 0.5.
        let mut p = LstmParams::zeros(2, 1);
        let wi = [0.2, -0.4];
        let wf = [0.1, 0.3];
        let wo = [-0.5, 0.6];
        let wc = [0.7, -0.2];
        let bias = [0.05, -0.1, 0.2, 0.0, 0.3, -0.3, 0.1, 0.4];
        for j in 0..2 {
            p.w[[j, 0]] = wi[j];
            p.w[[2 + j, 0]] = wf[j];
            p.w[[4 + j, 0]] = wo[j];
            p.w[[6 + j, 0]] = wc[j];
        }
        p.b = ndarray::Array1::from(bias.to_vec());
        let x = 0.5;
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let (h, cache) = p.forward(array![[x]].view()).unwrap();
        for j in 0..2 {
            let i = sig(wi[j] * x + bias[j]);
            let o = sig(wo[j] * x + bias[4 + j]);
            let g = (wc[j] * x + bias[6 + j]).tanh();
            // c_0 = 0, so the forget gate drops out of the first step.
            let c = i * g;
            assert!((cache.cell(0)[[0, j]] - c).abs() < 1e-15);
            assert!((h[j] - o * c.tanh()).abs() < 1e-15);
        }
    }

    #[test]
    fn head_applies_rectifier() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut net = Network::init(3, 1, 2, &mut rng);
        net.head = DenseHead { w: Array2::zeros((2, 3)), b: array![-1.0, 2.0] };
        let cache = net.forward_batch(Array3::from_elem((1, 4, 1), 0.3).view()).unwrap();
        assert_eq!(cache.output().unwrap().row(0).to_vec(), vec![0.0, 2.0]);
    }

    #[test]
    fn rejects_feature_mismatch() {
        let p = LstmParams::zeros(2, 3);
        assert!(matches!(p.forward(Array2::zeros((4, 2)).view()), Err(LstmError::InvalidInput(_))));
    }

    #[test]
    fn forward_is_bitwise_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let net = Network::init(8, 3, 2, &mut rng);
        let x = Array3::from_shape_fn((4, 7, 3), |(b, t, f)| ((b * 31 + t * 7 + f) as f64 * 0.37).sin());
        let a = net.forward_batch(x.view()).unwrap();
        let b = net.forward_batch(x.view()).unwrap();
        assert_eq!(a.output().unwrap(), b.output().unwrap());
        let _ = Gate::ALL;
    }

    proptest! {
        #[test]
        fn gates_and_cells_bounded(seed in 0u64..500, scale in 0.1f64..20.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut p = LstmParams::init(5, 2, &mut rng);
            p.w.mapv_inplace(|v| v * scale);
            p.u.mapv_inplace(|v| v * scale);
            let x = Array2::from_shape_fn((10, 2), |(t, f)| ((t * 3 + f) as f64).cos() * scale);
            let (_, cache) = p.forward(x.view()).unwrap();
            for t in 0..cache.steps() {
                let gates = cache.gates(t);
                for j in 0..15 {
                    let v = gates[[0, j]];
                    prop_assert!((0.0..=1.0).contains(&v));
                }
                for v in cache.tanh_cells[t].iter() {
                    prop_assert!(v.abs() <= 1.0);
                }
            }
        }
    }
}
