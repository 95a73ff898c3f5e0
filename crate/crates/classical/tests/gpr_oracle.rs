use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use pricecast_classical::gpr::GprGrid;
use pricecast_classical::{gpr_fit, gpr_optimize, GprSearch, KernelHyper};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn se(a: &[f64], b: &[f64], h: &KernelHyper) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    h.signal_variance * (-d2 / (2.0 * h.length_scale.powi(2))).exp()
}

/// Posterior mean and variance by a dense LU solve.
fn dense_oracle(x: &Array2<f64>, y: &[f64], h: &KernelHyper, q: &[f64]) -> (f64, f64) {
    let n = y.len();
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let k = DMatrix::from_fn(n, n, |i, j| se(&rows[i], &rows[j], h) + if i == j { h.noise_variance } else { 0.0 });
    let m = y.iter().sum::<f64>() / n as f64;
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - m));
    let ks = DVector::from_iterator(n, rows.iter().map(|r| se(r, q, h)));
    let lu = k.lu();
    let alpha = lu.solve(&yc).unwrap();
    let v = lu.solve(&ks).unwrap();
    (m + ks.dot(&alpha), h.signal_variance - ks.dot(&v))
}

fn random_instance(seed: u64) -> (Array2<f64>, Vec<f64>, KernelHyper) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=8);
    let d = rng.random_range(1..=3);
    let x = Array2::from_shape_fn((n, d), |_| rng.random_range(-2.0..2.0));
    let y = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    let h =
        KernelHyper::new(rng.random_range(0.5..3.0), rng.random_range(0.5..2.0), rng.random_range(0.05..0.5)).unwrap();
    (x, y, h)
}

#[test]
fn cholesky_matches_dense_solve_on_small_instances() {
    for seed in 0..50 {
        let (x, y, h) = random_instance(seed);
        let model = gpr_fit(x.view(), &y, h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
        let q = Array2::from_shape_fn((4, x.ncols()), |_| rng.random_range(-2.5..2.5));
        let (mu, var) = model.predict(q.view()).unwrap();
        for (i, row) in q.rows().into_iter().enumerate() {
            let (om, ov) = dense_oracle(&x, &y, &h, &row.to_vec());
            assert!((mu[i] - om).abs() < 1e-9, "seed {seed}: {} vs {om}", mu[i]);
            assert!((var[i] - ov.max(0.0)).abs() < 1e-9, "seed {seed}: {} vs {ov}", var[i]);
        }
    }
}

#[test]
fn noise_free_interpolation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = Array2::from_shape_fn((30, 2), |_| rng.random_range(0.0f64..5.0));
    let y: Vec<f64> = x.rows().into_iter().map(|r| r[0].sin() + r[1] * 0.3).collect();
    let model = gpr_fit(x.view(), &y, KernelHyper::new(1.0, 1.0, 0.0).unwrap()).unwrap();
    let (mu, var) = model.predict(x.view()).unwrap();
    for i in 0..30 {
        assert!((mu[i] - y[i]).abs() < 1e-6, "{} vs {}", mu[i], y[i]);
        assert!(var[i] <= 1e-8, "{}", var[i]);
    }
}

#[test]
fn far_query_reverts_to_prior() {
    let x = Array2::from_shape_vec((3, 1), vec![0.0, 1.0, 2.0]).unwrap();
    let y = [1.0, 4.0, 7.0];
    let h = KernelHyper::new(2.5, 0.7, 0.01).unwrap();
    let model = gpr_fit(x.view(), &y, h).unwrap();
    let (mu, var) = model.predict(Array2::from_elem((1, 1), 1e3).view()).unwrap();
    assert!((mu[0] - 4.0).abs() < 1e-12);
    assert!((var[0] - 2.5).abs() < 1e-12);
}

#[test]
fn length_scale_recovered_from_se_draws() {
    // Sample a GP path with ℓ = 1 on a 1-D grid through its Cholesky factor.
    let n = 80;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 * 0.15).collect();
    let truth = KernelHyper::new(1.0, 1.0, 1e-4).unwrap();
    let k = DMatrix::from_fn(n, n, |i, j| se(&[xs[i]], &[xs[j]], &truth) + if i == j { 1e-4 } else { 0.0 });
    let l = k.cholesky().unwrap().l();
    let mut ratios = Vec::new();
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = DVector::from_iterator(n, (0..n).map(|_| Normal::new(0.0, 1.0).unwrap().sample(&mut rng)));
        let y: Vec<f64> = (&l * z).iter().copied().collect();
        let x = Array2::from_shape_vec((n, 1), xs.clone()).unwrap();
        let h = gpr_optimize(x.view(), &y, &GprSearch::default()).unwrap();
        ratios.push(h.length_scale);
    }
    for r in &ratios {
        assert!(*r > 0.5 && *r < 2.0, "{ratios:?}");
    }
}

#[test]
fn white_noise_is_explained_as_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let normal = Normal::new(0.0, 2.0).unwrap();
    let x = Array2::from_shape_fn((60, 2), |_| rng.random_range(0.0f64..10.0));
    let y: Vec<f64> = (0..60).map(|_| normal.sample(&mut rng)).collect();
    let m = y.iter().sum::<f64>() / 60.0;
    let v = y.iter().map(|a| (a - m).powi(2)).sum::<f64>() / 60.0;
    let h = gpr_optimize(x.view(), &y, &GprSearch::default()).unwrap();
    assert!(h.noise_variance > 0.5 * v && h.noise_variance < 2.0 * v, "{h:?} vs var {v}");
    assert!(h.signal_variance < h.noise_variance, "{h:?}");
}

#[test]
fn empty_grid_is_rejected() {
    let x = Array2::from_shape_vec((2, 1), vec![0.0, 1.0]).unwrap();
    let s = GprSearch { grid: GprGrid::Explicit(vec![]), refine_iters: 0, seed: 0 };
    assert!(gpr_optimize(x.view(), &[1.0, 2.0], &s).is_err());
}

#[test]
fn serde_round_trip_predicts_identically() {
    let (x, y, h) = random_instance(3);
    let model = gpr_fit(x.view(), &y, h).unwrap();
    let back: pricecast_classical::GprModel = serde_json::from_str(&serde_json::to_string(&model).unwrap()).unwrap();
    let q = Array2::from_shape_fn((5, x.ncols()), |(i, j)| i as f64 * 0.3 - j as f64);
    assert_eq!(model.predict(q.view()).unwrap(), back.predict(q.view()).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn posterior_variance_is_bounded(seed in 0u64..10_000, qx in -4.0f64..4.0) {
        let (x, y, h) = random_instance(seed);
        let model = gpr_fit(x.view(), &y, h).unwrap();
        let q = Array2::from_elem((1, x.ncols()), qx);
        let (_, var) = model.predict(q.view()).unwrap();
        prop_assert!(var[0] >= 0.0);
        prop_assert!(var[0] <= h.signal_variance + h.noise_variance + 1e-9);
    }
}
