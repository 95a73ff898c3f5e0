use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pricecast_core::smoothing::moving_average;
use pricecast_core::{MonthlySeries, YearMonth};
use pricecast_experiment::config::{parse_cases, parse_list};
use pricecast_experiment::output::{cell_dir, read_predictions_csv, read_results_csv, write_grid_outputs};
use pricecast_experiment::synth::DEFAULT_SEED;
use pricecast_experiment::{
    forecast_next, load_all, plot_series, report, results_table, run_cell, run_grid, CellSpec, ExperimentConfig,
    ExperimentError, ModelFile, ModelKind, Preprocessing, ReportFormat, Result,
};

#[derive(Parser)]
#[command(name = "pricecast", version, about = "District wheat price forecasting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// Key-value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated: bagged_trees,gpr,arima,lstm
    #[arg(long)]
    models: Option<String>,
    /// Comma-separated case ids 1-4.
    #[arg(long)]
    cases: Option<String>,
    /// Comma-separated district names from the config.
    #[arg(long)]
    districts: Option<String>,
    #[arg(long = "smooth-window")]
    smooth_window: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Load and align every CSV named in the config.
    Ingest(Common),
    /// Write a synthetic dataset and a config that points at it.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 28)]
        years: usize,
    },
    /// Evaluate a single cell.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        district: Option<String>,
        #[arg(long)]
        case: u8,
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "smooth")]
        preprocessing: String,
    },
    /// Evaluate every district, case, model and preprocessing arm.
    Grid(Common),
    /// Render RMSE matrices and the LSTM MAPE summary from results.csv.
    Report {
        #[command(flatten)]
        common: Common,
        /// results.csv to read; defaults to <out>/results.csv.
        #[arg(long)]
        results: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Draw price charts and, when present, prediction charts as SVG.
    Plot(Common),
    /// Forecast the months after the data's last month with a saved model.
    Forecast {
        #[command(flatten)]
        common: Common,
        /// Model file written by `run` or `grid`.
        #[arg(long)]
        model: PathBuf,
        /// District data to forecast from; defaults to the model's district.
        #[arg(long)]
        district: Option<String>,
    },
}

fn split_names(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let path = common.config.as_ref().ok_or_else(|| ExperimentError::Usage("--config <path> is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(m) = &common.models {
        cfg.models = parse_list(m)?;
    }
    if let Some(c) = &common.cases {
        cfg.cases = parse_cases(c)?;
    }
    if let Some(d) = &common.districts {
        cfg.restrict_districts(&split_names(d))?;
    }
    if let Some(w) = common.smooth_window {
        cfg.smooth_window = w;
    }
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(ExperimentError::InvalidParameter("--workers must be >= 1".into()));
        }
        cfg.workers = Some(w);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| ExperimentError::Io { path: path.to_path_buf(), source: e })
}

fn ingest(common: &Common) -> Result<()> {
    let cfg = load_config(common)?;
    for d in load_all(&cfg)? {
        println!(
            "{}: {} months {}..{}, aligned {}..{}, features: {}",
            d.name,
            d.prices.len(),
            d.prices.start(),
            d.prices.end(),
            d.table.start(),
            d.table.end(),
            d.table.feature_names().join(",")
        );
    }
    Ok(())
}

fn synth(out: &Path, seed: u64, years: usize) -> Result<()> {
    let data = pricecast_experiment::generate_synthetic_dataset(seed, years)?;
    data.write_to(out, seed)?;
    println!(
        "wrote {} districts and {} covariates to {}",
        data.districts.len(),
        data.yearly.len() + data.monthly.len(),
        out.display()
    );
    println!("config: {}", out.join("pricecast.cfg").display());
    Ok(())
}

fn run(common: &Common, district: Option<&str>, case: u8, model: &str, preprocessing: &str) -> Result<()> {
    let mut cfg = load_config(common)?;
    let district = match district {
        Some(d) => d.to_string(),
        None => cfg
            .districts
            .first()
            .map(|(d, _)| d.clone())
            .ok_or_else(|| ExperimentError::Usage("--district is required".into()))?,
    };
    parse_cases(&case.to_string())?;
    let spec =
        CellSpec::new(district.clone(), case, model.parse::<ModelKind>()?, preprocessing.parse::<Preprocessing>()?);
    cfg.restrict_districts(std::slice::from_ref(&district))?;
    let data = load_all(&cfg)?;
    let outcome = run_cell(&cfg, &data[0], &spec)?;
    let dir = cell_dir(&cfg.out, &spec.id());
    create_dir(&dir)?;
    pricecast_experiment::output::write_predictions_csv(&dir.join("predictions.csv"), &outcome.result.predictions)?;
    if let Some(file) = &outcome.model {
        file.save(&dir.join("model.json"))?;
    }
    let r = &outcome.result;
    println!("{spec}");
    println!("rmse {:.4}", r.rmse.unwrap_or(f64::NAN));
    println!("mape {:.4}", r.mape.unwrap_or(f64::NAN));
    println!("predictions {}", r.n_predictions);
    println!("model {}", r.hyperparameters);
    println!("written to {}", dir.display());
    Ok(())
}

fn grid(common: &Common) -> Result<ExitCode> {
    let cfg = load_config(common)?;
    let data = load_all(&cfg)?;
    let outcomes = run_grid(&cfg, &data)?;
    let table = write_grid_outputs(&cfg.out, &outcomes)?;
    let failed: Vec<_> = table.rows.iter().filter(|r| !r.is_ok()).collect();
    println!("{} cells, {} failed; results in {}", table.len(), failed.len(), cfg.out.join("results.csv").display());
    for r in &failed {
        eprintln!("failed: {}: {:?}", r.spec(), r.status);
    }
    debug_assert_eq!(results_table(&outcomes), table);
    Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn results_path(common: &Common, results: Option<&PathBuf>) -> Result<PathBuf> {
    if let Some(r) = results {
        return Ok(r.clone());
    }
    if let Some(out) = &common.out {
        return Ok(out.join("results.csv"));
    }
    if common.config.is_some() {
        return Ok(load_config(common)?.out.join("results.csv"));
    }
    Err(ExperimentError::Usage("one of --results, --out or --config is required".into()))
}

fn report_cmd(common: &Common, results: Option<&PathBuf>, format: &str) -> Result<()> {
    let format: ReportFormat = format.parse()?;
    let path = results_path(common, results)?;
    let models = match &common.models {
        Some(m) => parse_list(m)?,
        None => Vec::new(),
    };
    let table = read_results_csv(&path)?;
    let rendered = report(&table, &models, format)?;
    let ext = match format {
        ReportFormat::Text => "txt",
        ReportFormat::Csv => "csv",
    };
    let target = path.parent().unwrap_or(Path::new(".")).join(format!("report.{ext}"));
    std::fs::write(&target, &rendered).map_err(|e| ExperimentError::Io { path: target.clone(), source: e })?;
    print!("{rendered}");
    Ok(())
}

/// Predictions as a monthly series over their own date span. Overlapping
/// windows keep the first forecast for a month; gaps become NaN.
fn prediction_series(path: &Path) -> Result<Option<(MonthlySeries, MonthlySeries)>> {
    let rows = read_predictions_csv(path)?;
    let mut by_date: BTreeMap<YearMonth, (f64, f64)> = BTreeMap::new();
    for r in rows {
        by_date.entry(r.date).or_insert((r.actual, r.predicted));
    }
    let (Some((&start, _)), Some((&end, _))) = (by_date.first_key_value(), by_date.last_key_value()) else {
        return Ok(None);
    };
    let n = start.months_until(end) as usize + 1;
    let mut actual = vec![f64::NAN; n];
    let mut predicted = vec![f64::NAN; n];
    for (d, (a, p)) in by_date {
        let i = start.months_until(d) as usize;
        actual[i] = a;
        predicted[i] = p;
    }
    Ok(Some((MonthlySeries::new(start, actual, "price")?, MonthlySeries::new(start, predicted, "price")?)))
}

fn plot(common: &Common) -> Result<()> {
    let cfg = load_config(common)?;
    let dir = cfg.out.join("plots");
    create_dir(&dir)?;
    for d in load_all(&cfg)? {
        let smooth = MonthlySeries::new(
            d.prices.start(),
            moving_average(d.prices.values(), cfg.smooth_window)?,
            d.prices.unit(),
        )?;
        let path = dir.join(format!("{}_prices.svg", d.name));
        plot_series(
            &format!("{}: original and smoothed prices", d.name),
            &d.prices,
            &[(format!("smoothed (window {})", cfg.smooth_window), smooth)],
            &path,
        )?;
        println!("{}", path.display());
    }
    let cells = cfg.out.join("cells");
    if let Ok(entries) = std::fs::read_dir(&cells) {
        let mut ids: Vec<String> =
            entries.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
        ids.sort();
        for id in ids {
            let file = cells.join(&id).join("predictions.csv");
            if !file.exists() {
                continue;
            }
            if let Some((actual, predicted)) = prediction_series(&file)? {
                let path = dir.join(format!("{id}.svg"));
                plot_series(&id, &actual, &[("predicted".into(), predicted)], &path)?;
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn forecast(common: &Common, model: &Path, district: Option<&str>) -> Result<()> {
    let file = ModelFile::load(model)?;
    let mut cfg = load_config(common)?;
    let name = district.unwrap_or(&file.district).to_string();
    cfg.restrict_districts(std::slice::from_ref(&name))?;
    let data = load_all(&cfg)?;
    println!("date,forecast");
    for (date, value) in forecast_next(&file, &data[0].table)? {
        println!("{date},{value}");
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Ingest(c) => ingest(&c)?,
        Command::Synth { out, seed, years } => synth(&out, seed, years)?,
        Command::Run { common, district, case, model, preprocessing } => {
            run(&common, district.as_deref(), case, &model, &preprocessing)?
        }
        Command::Grid(c) => return grid(&c),
        Command::Report { common, results, format } => report_cmd(&common, results.as_ref(), &format)?,
        Command::Plot(c) => plot(&c)?,
        Command::Forecast { common, model, district } => forecast(&common, &model, district.as_deref())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
