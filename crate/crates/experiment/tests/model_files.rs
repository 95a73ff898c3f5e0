mod common;

use common::small;
use pricecast_core::CaseSpec;
use pricecast_experiment::runner::prepare_cell;
use pricecast_experiment::{forecast_next, run_cell, CellSpec, ExperimentError, ModelFile, ModelKind, Preprocessing};

#[test]
fn saved_models_predict_bitwise_identically() {
    let (cfg, data) = small(&ModelKind::ALL);
    let dir = tempfile::tempdir().unwrap();
    for model in ModelKind::ALL {
        let spec = CellSpec::new(data[0].name.clone(), 2, model, Preprocessing::Smooth);
        let file = run_cell(&cfg, &data[0], &spec).unwrap().model.unwrap();
        let path = dir.path().join(format!("{}.json", spec.id()));
        file.save(&path).unwrap();
        let loaded = ModelFile::load(&path).unwrap();
        assert_eq!(loaded.model.kind(), model);
        assert_eq!(loaded.case, CaseSpec::by_id(2).unwrap());
        assert_eq!(loaded.feature_names, file.feature_names);
        let prepared = prepare_cell(&data[0].table, loaded.case, Preprocessing::Smooth, &cfg).unwrap();
        for k in 0..prepared.test.len() {
            let a = file.model.predict(prepared.test.window(k)).unwrap();
            let b = loaded.model.predict(prepared.test.window(k)).unwrap();
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a), bits(&b), "{model} window {k}");
        }
    }
}

#[test]
fn forecast_continues_after_the_data() {
    let (cfg, data) = small(&[ModelKind::Arima]);
    for case in [1, 3] {
        let spec = CellSpec::new(data[0].name.clone(), case, ModelKind::Arima, Preprocessing::Raw);
        let file = run_cell(&cfg, &data[0], &spec).unwrap().model.unwrap();
        let out = forecast_next(&file, &data[0].table).unwrap();
        let horizon = CaseSpec::by_id(case).unwrap().horizon;
        assert_eq!(out.len(), horizon);
        assert_eq!(out[0].0, data[0].table.end().add_months(1));
        assert!(out.iter().all(|(_, v)| v.is_finite() && *v > 0.0));
    }
}

#[test]
fn wrong_format_or_version_rejected() {
    let (cfg, data) = small(&[ModelKind::BaggedTrees]);
    let spec = CellSpec::new(data[0].name.clone(), 1, ModelKind::BaggedTrees, Preprocessing::Raw);
    let file = run_cell(&cfg, &data[0], &spec).unwrap().model.unwrap();
    let dir = tempfile::tempdir().unwrap();

    let mut other = file.clone();
    other.version += 1;
    let path = dir.path().join("v.json");
    other.save(&path).unwrap();
    let err = ModelFile::load(&path).unwrap_err();
    assert!(matches!(err, ExperimentError::ModelFile { .. }));
    assert_eq!(err.exit_code(), 3);

    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "{\"format\": 1}").unwrap();
    assert!(matches!(ModelFile::load(&path), Err(ExperimentError::ModelFile { .. })));
}

#[test]
fn feature_mismatch_is_rejected_for_forecast() {
    let (cfg, data) = small(&[ModelKind::Arima]);
    let spec = CellSpec::new(data[0].name.clone(), 2, ModelKind::Arima, Preprocessing::Raw);
    let file = run_cell(&cfg, &data[0], &spec).unwrap().model.unwrap();
    assert!(forecast_next(&file, &data[0].table.target_only()).is_err());
}
