use std::path::Path;
use std::process::{Command, Output};

fn pricecast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pricecast")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn synth(dir: &Path) -> String {
    let o = pricecast(&["synth", "--out", dir.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir.join("pricecast.cfg").to_string_lossy().into_owned()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&pricecast(&[])), 1);
    assert_eq!(code(&pricecast(&["frobnicate"])), 1);
    assert_eq!(code(&pricecast(&["grid", "--workers", "lots"])), 1);
    assert_eq!(code(&pricecast(&["ingest"])), 1, "missing --config");
    assert_eq!(code(&pricecast(&["--help"])), 0);
    assert_eq!(code(&pricecast(&["--version"])), 0);
}

#[test]
fn synth_then_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synth(dir.path());
    for f in ["faisalabad.csv", "gujranwala.csv", "multan.csv", "domestic_consumption.csv", "province_production.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let o = pricecast(&["ingest", "--config", &cfg]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(out.lines().count(), 3);
    assert!(out.contains("Multan: 336 months"));
    assert_eq!(code(&pricecast(&["synth", "--out", dir.path().join("x").to_str().unwrap(), "--years", "3"])), 1);
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synth(dir.path());
    std::fs::write(dir.path().join("multan.csv"), "date,price\n2001-01,abc\n").unwrap();
    assert_eq!(code(&pricecast(&["ingest", "--config", &cfg])), 2);
    assert_eq!(code(&pricecast(&["ingest", "--config", dir.path().join("missing.cfg").to_str().unwrap()])), 2);
    std::fs::write(dir.path().join("broken.cfg"), "this is not a config\n").unwrap();
    assert_eq!(code(&pricecast(&["ingest", "--config", dir.path().join("broken.cfg").to_str().unwrap()])), 2);
}

#[test]
fn run_report_plot_forecast() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synth(dir.path());
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    let o = pricecast(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out_s,
        "--district",
        "Multan",
        "--case",
        "1",
        "--model",
        "bagged_trees",
        "--preprocessing",
        "raw",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cell = out.join("cells").join("Multan_case1_bagged_trees_raw");
    let preds = std::fs::read_to_string(cell.join("predictions.csv")).unwrap();
    assert!(preds.starts_with("date,actual,predicted\n"));
    assert_eq!(preds.lines().count(), 25);

    let o = pricecast(&[
        "grid",
        "--config",
        &cfg,
        "--out",
        out_s,
        "--models",
        "arima",
        "--cases",
        "1,3",
        "--districts",
        "Multan,Faisalabad",
        "--workers",
        "2",
        "--smooth-window",
        "6",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 8);
    // Districts keep config order.
    assert!(results.lines().nth(1).unwrap().starts_with("Faisalabad,1,arima,raw,ok"));

    let o = pricecast(&["report", "--out", out_s]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("Case 3") && text.contains("ARIMA"));
    assert!(out.join("report.txt").exists());
    assert_eq!(code(&pricecast(&["report", "--out", out_s, "--format", "pdf"])), 1);
    assert_eq!(code(&pricecast(&["report", "--out", out_s, "--models", "lstm"])), 1);
    assert_eq!(code(&pricecast(&["report", "--out", dir.path().join("none").to_str().unwrap()])), 2);

    let o = pricecast(&["plot", "--config", &cfg, "--out", out_s]);
    assert_eq!(code(&o), 0);
    assert!(out.join("plots").join("Multan_prices.svg").exists());
    assert!(out.join("plots").join("Faisalabad_case3_arima_smooth.svg").exists());

    let model = out.join("cells").join("Faisalabad_case3_arima_raw").join("model.json");
    let o = pricecast(&["forecast", "--config", &cfg, "--model", model.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().nth(1).unwrap().starts_with("2019-01,"));
}

#[test]
fn model_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synth(dir.path());
    let bad = dir.path().join("model.json");
    std::fs::write(&bad, "{\"format\":\"something-else\"}").unwrap();
    assert_eq!(code(&pricecast(&["forecast", "--config", &cfg, "--model", bad.to_str().unwrap()])), 3);
}
