//! Central finite-difference check of the BPTT gradients.

use ndarray::{Array2, Array3};
use pricecast_lstm::Network;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-5;
const TOL: f64 = 1e-4;
/// Entries below this magnitude are compared on an absolute scale.
const FLOOR: f64 = 1e-6;

/// Objective `sum(weights ⊙ output)` and its upstream gradient `weights`.
fn objective(net: &Network, x: &Array3<f64>, weights: &Array2<f64>) -> f64 {
    let cache = net.forward_batch(x.view()).unwrap();
    (&cache.output().unwrap() * weights).sum()
}

/// Returns the max relative error over every parameter entry.
pub fn max_relative_error(seed: u64, features: usize, horizon: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Network::init(4, features, horizon, &mut rng);
    // Positive head bias keeps the rectifier away from its kink.
    net.head.b.mapv_inplace(|_| rng.random_range(0.5..1.5));
    net.lstm.b.mapv_inplace(|v| v + rng.random_range(-0.5..0.5));
    let x = Array3::from_shape_fn((2, 5, features), |_| rng.random_range(-1.0..1.0));
    let weights = Array2::from_shape_fn((2, horizon), |_| rng.random_range(-1.0..1.0));

    let cache = net.forward_batch(x.view()).unwrap();
    let grads = net.backward(&cache, weights.view()).unwrap();
    let analytic: Vec<Vec<f64>> = grads.slices().iter().map(|s| s.to_vec()).collect();

    let mut worst = 0.0f64;
    for (k, a_tensor) in analytic.iter().enumerate() {
        for i in 0..a_tensor.len() {
            let orig = net.slices()[k][i];
            net.slices_mut()[k][i] = orig + EPS;
            let up = objective(&net, &x, &weights);
            net.slices_mut()[k][i] = orig - EPS;
            let down = objective(&net, &x, &weights);
            net.slices_mut()[k][i] = orig;
            let numeric = (up - down) / (2.0 * EPS);
            let a = a_tensor[i];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FLOOR);
            worst = worst.max(rel);
        }
    }
    worst
}

#[test]
fn bptt_matches_central_differences() {
    for seed in 0..20u64 {
        let features = if seed % 2 == 0 { 1 } else { 3 };
        let horizon = if (seed / 2) % 2 == 0 { 1 } else { 2 };
        let err = max_relative_error(seed, features, horizon);
        assert!(err < TOL, "seed {seed}: max relative error {err:e}");
    }
}
