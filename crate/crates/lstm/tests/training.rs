use ndarray::Axis;
use pricecast_core::{build_windows, AlignedTable, CaseSpec, SupervisedWindows, YearMonth};
use pricecast_lstm::{train, LstmModel, TrainConfig};

fn windows(values: Vec<f64>, case: CaseSpec) -> SupervisedWindows {
    let t = AlignedTable::new(YearMonth::new(1991, 1).unwrap(), values, vec![]).unwrap();
    build_windows(&t, case).unwrap()
}

fn wavy(n: usize) -> Vec<f64> {
    (0..n).map(|i| 500.0 + 3.0 * i as f64 + 40.0 * (i as f64 * 0.52).sin()).collect()
}

#[test]
fn constant_target_loss_falls_to_zero() {
    // A constant series scales to a constant 0 column; the network only has
    // to learn to emit 0 through the rectifier.
    let case = CaseSpec::by_id(1).unwrap();
    let w = windows(vec![250.0; 120], case);
    let model = train(&w, &TrainConfig::with_seed(3), case).unwrap();
    let h = model.loss_history();
    assert_eq!(h.len(), 50);
    for pair in h.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "loss increased: {pair:?}");
    }
    assert!(*h.last().unwrap() < 1e-3, "final loss {}", h.last().unwrap());
    let p = model.predict(w.window(0)).unwrap();
    assert!((p[0] - 250.0).abs() < 1e-9);
}

#[test]
fn training_is_deterministic() {
    let case = CaseSpec::by_id(3).unwrap();
    let w = windows(wavy(90), case);
    let cfg = TrainConfig { hidden_size: 8, max_epochs: 5, ..TrainConfig::with_seed(11) };
    let a = train(&w, &cfg, case).unwrap();
    let b = train(&w, &cfg, case).unwrap();
    assert_eq!(a, b);
    let c = train(&w, &TrainConfig { seed: 12, ..cfg }, case).unwrap();
    assert_ne!(a.loss_history(), c.loss_history());
}

#[test]
fn learns_a_smooth_series() {
    let case = CaseSpec::by_id(1).unwrap();
    let w = windows(wavy(200), case);
    let model = train(&w, &TrainConfig::with_seed(1), case).unwrap();
    let h = model.loss_history();
    assert!(h.last().unwrap() < &(h[0] * 0.5), "history {h:?}");
}

#[test]
fn prediction_shapes_and_scaler_round_trip() {
    for id in [1u8, 3] {
        let case = CaseSpec::by_id(id).unwrap();
        let w = windows(wavy(80), case);
        let cfg = TrainConfig { hidden_size: 6, max_epochs: 2, ..TrainConfig::with_seed(2) };
        let model = train(&w, &cfg, case).unwrap();
        let p = model.predict(w.window(0)).unwrap();
        assert_eq!(p.len(), case.horizon);

        let raw = model.predict_scaled_batch(w.inputs().view()).unwrap();
        assert!(raw.iter().all(|v| *v >= 0.0));
        let prices = model.predict_batch(w.inputs().view()).unwrap();
        let tf = case.n_features - 1;
        for (r, p) in raw.iter().zip(prices.iter()) {
            assert!((model.scaler().apply_value(tf, *p) - r).abs() < 1e-9);
        }
        // Batch and single-window paths agree.
        let single = model.predict(w.inputs().index_axis(Axis(0), 3)).unwrap();
        for (a, b) in single.iter().zip(prices.row(3)) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn serialized_model_predicts_bitwise_identically() {
    let case = CaseSpec::by_id(1).unwrap();
    let w = windows(wavy(60), case);
    let cfg = TrainConfig { hidden_size: 7, max_epochs: 3, ..TrainConfig::with_seed(5) };
    let model = train(&w, &cfg, case).unwrap();
    let json = serde_json::to_string(&model).unwrap();
    let back: LstmModel = serde_json::from_str(&json).unwrap();
    back.validate().unwrap();
    assert_eq!(model, back);
    let a = model.predict_batch(w.inputs().view()).unwrap();
    let b = back.predict_batch(w.inputs().view()).unwrap();
    assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn rejects_wrong_window_shape() {
    let case = CaseSpec::by_id(1).unwrap();
    let w = windows(wavy(40), case);
    let cfg = TrainConfig { hidden_size: 4, max_epochs: 1, ..TrainConfig::default() };
    let model = train(&w, &cfg, case).unwrap();
    assert!(model.predict(ndarray::Array2::zeros((11, 1)).view()).is_err());
}
