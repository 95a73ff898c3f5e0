//! Backpropagation through time.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis};

use crate::error::{LstmError, Result};
use crate::forward::ForwardCache;
use crate::params::{DenseHead, LstmParams, Network};

/// Gradients with the same shapes as [`Network`].
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGrads {
    pub lstm: LstmParams,
    pub head: DenseHead,
}

impl NetworkGrads {
    pub fn zeros_like(net: &Network) -> Self {
        Self {
            lstm: LstmParams::zeros(net.lstm.hidden_size(), net.lstm.n_features()),
            head: DenseHead::zeros(net.head.horizon(), net.lstm.hidden_size()),
        }
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

    fn slices_mut(&mut self) -> [&mut [f64]; 5] {
        [
            self.lstm.w.as_slice_mut().expect("standard layout"),
            self.lstm.u.as_slice_mut().expect("standard layout"),
            self.lstm.b.as_slice_mut().expect("standard layout"),
            self.head.w.as_slice_mut().expect("standard layout"),
            self.head.b.as_slice_mut().expect("standard layout"),
        ]
    }

    pub fn global_norm(&self) -> f64 {
        self.slices().iter().flat_map(|s| s.iter()).map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Rescales `grads` so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_global_norm(grads: &mut NetworkGrads, max_norm: f64) -> f64 {
    let norm = grads.global_norm();
    if norm > max_norm && norm > 0.0 {
        let scale = max_norm / norm;
        for s in grads.slices_mut() {
            s.iter_mut().for_each(|v| *v *= scale);
        }
    }
    norm
}

impl LstmParams {
    /// Reverse pass through the recurrence given `dL/dh_T` (`B × H`).
    /// Returns the LSTM parameter gradients.
    pub fn backward(&self, cache: &ForwardCache, d_hidden: ArrayView2<'_, f64>) -> Result<LstmParams> {
        let h = self.hidden_size();
        if cache.hidden_size() != h || cache.n_features() != self.n_features() {
            return Err(LstmError::InvalidState(format!(
                "cache from a {}x{} network, parameters are {}x{}",
                cache.hidden_size(),
                cache.n_features(),
                h,
                self.n_features()
            )));
        }
        let batch = cache.batch_size();
        if d_hidden.dim() != (batch, h) {
            return Err(LstmError::InvalidInput("upstream gradient shape does not match the cache".into()));
        }

        let mut grads = LstmParams::zeros(h, self.n_features());
        let mut dh = d_hidden.to_owned();
        let mut dc = Array2::<f64>::zeros((batch, h));
        let mut dz = Array2::<f64>::zeros((batch, 4 * h));

        for t in (0..cache.steps()).rev() {
            let gates = &cache.gates[t];
            let c_prev = &cache.cells[t];
            let tc = &cache.tanh_cells[t];
            for r in 0..batch {
                for j in 0..h {
                    let i_g = gates[[r, j]];
                    let f_g = gates[[r, h + j]];
                    let o_g = gates[[r, 2 * h + j]];
                    let g_g = gates[[r, 3 * h + j]];
                    let tv = tc[[r, j]];
                    let dhv = dh[[r, j]];
                    let dcv = dc[[r, j]] + dhv * o_g * (1.0 - tv * tv);
                    dz[[r, j]] = dcv * g_g * i_g * (1.0 - i_g);
                    dz[[r, h + j]] = dcv * c_prev[[r, j]] * f_g * (1.0 - f_g);
                    dz[[r, 2 * h + j]] = dhv * tv * o_g * (1.0 - o_g);
                    dz[[r, 3 * h + j]] = dcv * i_g * (1.0 - g_g * g_g);
                    dc[[r, j]] = dcv * f_g;
                }
            }
            general_mat_mul(1.0, &dz.t(), &cache.inputs.slice(s![.., t, ..]), 1.0, &mut grads.w);
            general_mat_mul(1.0, &dz.t(), &cache.hiddens[t], 1.0, &mut grads.u);
            grads.b += &dz.sum_axis(Axis(0));
            dh = dz.dot(&self.u);
        }
        Ok(grads)
    }
}

impl Network {
    /// Gradients of all parameters given `dL/d(output)` (`B × horizon`).
    pub fn backward(&self, cache: &ForwardCache, d_output: ArrayView2<'_, f64>) -> Result<NetworkGrads> {
        let pre = cache
            .head_pre
            .as_ref()
            .ok_or_else(|| LstmError::InvalidState("cache was produced without the dense head".into()))?;
        if d_output.dim() != pre.dim() {
            return Err(LstmError::InvalidInput(format!(
                "upstream gradient is {:?}, output is {:?}",
                d_output.dim(),
                pre.dim()
            )));
        }
        if pre.ncols() != self.head.horizon() {
            return Err(LstmError::InvalidState("cache horizon does not match the dense head".into()));
        }
        let mut d_pre = d_output.to_owned();
        d_pre.zip_mut_with(pre, |d, p| {
            if *p <= 0.0 {
                *d = 0.0
            }
        });
        let h_final = cache.final_hidden();
        let head_w = d_pre.t().dot(&h_final);
        let head_b: Array1<f64> = d_pre.sum_axis(Axis(0));
        let d_hidden = d_pre.dot(&self.head.w);
        let lstm = self.lstm.backward(cache, d_hidden.view())?;
        Ok(NetworkGrads { lstm, head: DenseHead { w: head_w, b: head_b } })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = Network::init(4, 2, 3, &mut rng);
        let x = Array3::from_shape_fn((2, 5, 2), |(b, t, f)| (b + t + f) as f64 * 0.1);
        let cache = net.forward_batch(x.view()).unwrap();
        let g = net.backward(&cache, Array2::zeros((2, 3)).view()).unwrap();
        assert_eq!(g.global_norm(), 0.0);
    }

    #[test]
    fn mismatched_cache_is_invalid_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let small = Network::init(3, 1, 1, &mut rng);
        let big = Network::init(4, 1, 1, &mut rng);
        let cache = small.forward_batch(Array3::zeros((1, 3, 1)).view()).unwrap();
        assert!(matches!(big.lstm.backward(&cache, Array2::zeros((1, 4)).view()), Err(LstmError::InvalidState(_))));
        let bare = small.lstm.forward_batch(Array3::zeros((1, 3, 1)).view()).unwrap();
        assert!(matches!(small.backward(&bare, Array2::zeros((1, 1)).view()), Err(LstmError::InvalidState(_))));
    }

    #[test]
    fn clipping_rescales_to_max_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = Network::init(2, 1, 1, &mut rng);
        let mut g = NetworkGrads::zeros_like(&net);
        // One 3-4-12 entry set: norm = sqrt(9 + 16 + 144) = 13.
        g.lstm.w[[0, 0]] = 3.0;
        g.lstm.u[[1, 1]] = 4.0;
        g.head.b[0] = 12.0;
        let before = clip_global_norm(&mut g, 1.0);
        assert!((before - 13.0).abs() < 1e-12);
        assert!((g.global_norm() - 1.0).abs() < 1e-12);
        assert!((g.head.b[0] - 12.0 / 13.0).abs() < 1e-12);

        let mut small = NetworkGrads::zeros_like(&net);
        small.head.b[0] = 0.5;
        clip_global_norm(&mut small, 1.0);
        assert_eq!(small.head.b[0], 0.5);
    }
}
