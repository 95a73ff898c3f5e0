//! Report rendering: one RMSE matrix per case (models down, district and
//! preprocessing arm across) and a summary of LSTM MAPE per forecast horizon.
//!
//! The CSV rendering is long-form with full precision, one value per row:
//! `metric,case,horizon,model,district,preprocessing,value`. Summary rows use
//! `lstm_mape`, leave `case` empty and put `all` in `district`.

use std::fmt::Write as _;
use std::str::FromStr;

use pricecast_core::CaseSpec;

use crate::config::{ModelKind, Preprocessing};
use crate::error::{ExperimentError, Result};
use crate::runner::ResultsTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            other => {
                Err(ExperimentError::InvalidParameter(format!("unknown report format '{other}'; expected text or csv")))
            }
        }
    }
}

pub const REPORT_CSV_HEADER: &str = "metric,case,horizon,model,district,preprocessing,value";

fn case_title(case: u8) -> String {
    match case {
        1 => "Case 1: one month prediction with price data".into(),
        2 => "Case 2: one month prediction with price and covariates".into(),
        3 => "Case 3: twelve month prediction with price data".into(),
        4 => "Case 4: twelve month prediction with price and covariates".into(),
        c => format!("Case {c}"),
    }
}

/// Cell of one matrix; `None` for failed or missing runs.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRow {
    pub model: ModelKind,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseMatrix {
    pub case_id: u8,
    pub horizon: usize,
    /// (district, arm) pairs in column order.
    pub columns: Vec<(String, Preprocessing)>,
    pub rows: Vec<MatrixRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapeSummary {
    pub horizon: usize,
    pub preprocessing: Preprocessing,
    /// Mean LSTM MAPE (percent) over every district and case with this horizon.
    pub mape: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub matrices: Vec<CaseMatrix>,
    pub summary: Vec<MapeSummary>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Builds the report from the rows of `table` whose model is in `models`.
/// An empty `models` keeps every model in the table.
pub fn build_report(table: &ResultsTable, models: &[ModelKind]) -> Result<Report> {
    if table.is_empty() {
        return Err(ExperimentError::InvalidParameter("results table is empty".into()));
    }
    let mut present: Vec<ModelKind> = table.rows.iter().map(|r| r.model).collect();
    present.sort_unstable();
    present.dedup();
    let selected: Vec<ModelKind> = present.into_iter().filter(|m| models.is_empty() || models.contains(m)).collect();
    if selected.is_empty() {
        return Err(ExperimentError::InvalidParameter("none of the requested models appear in the results".into()));
    }

    let mut districts: Vec<String> = Vec::new();
    for r in &table.rows {
        if !districts.contains(&r.district) {
            districts.push(r.district.clone());
        }
    }
    let mut cases: Vec<u8> = table.rows.iter().map(|r| r.case_id).collect();
    cases.sort_unstable();
    cases.dedup();
    let columns: Vec<(String, Preprocessing)> =
        districts.iter().flat_map(|d| Preprocessing::ALL.map(|p| (d.clone(), p))).collect();

    let mut matrices = Vec::new();
    for &case_id in &cases {
        let horizon = CaseSpec::by_id(case_id)?.horizon;
        let rows = selected
            .iter()
            .map(|&model| MatrixRow {
                model,
                values: columns.iter().map(|(d, p)| table.get(d, case_id, model, *p).and_then(|r| r.rmse)).collect(),
            })
            .collect();
        matrices.push(CaseMatrix { case_id, horizon, columns: columns.clone(), rows });
    }

    let mut summary = Vec::new();
    let mut horizons: Vec<usize> = matrices.iter().map(|m| m.horizon).collect();
    horizons.dedup();
    if selected.contains(&ModelKind::Lstm) {
        for &horizon in &horizons {
            for prep in Preprocessing::ALL {
                let v: Vec<f64> = table
                    .rows
                    .iter()
                    .filter(|r| r.model == ModelKind::Lstm && r.preprocessing == prep)
                    .filter(|r| CaseSpec::by_id(r.case_id).map(|c| c.horizon == horizon).unwrap_or(false))
                    .filter_map(|r| r.mape)
                    .collect();
                summary.push(MapeSummary { horizon, preprocessing: prep, mape: mean(&v) });
            }
        }
    }
    Ok(Report { matrices, summary })
}

fn fmt2(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into())
}

fn horizon_label(h: usize) -> String {
    if h == 1 {
        "next month".into()
    } else {
        format!("{h} months")
    }
}

fn render_text(report: &Report) -> String {
    let mut s = String::new();
    for m in &report.matrices {
        let _ = writeln!(s, "{} (RMSE)", case_title(m.case_id));
        let headers: Vec<String> = m.columns.iter().map(|(d, p)| format!("{d} {p}")).collect();
        let widths: Vec<usize> = headers.iter().map(|h| h.len().max(10)).collect();
        let _ = write!(s, "{:<14}", "Model");
        for (h, w) in headers.iter().zip(&widths) {
            let _ = write!(s, "  {h:>w$}");
        }
        s.push('\n');
        for row in &m.rows {
            let _ = write!(s, "{:<14}", row.model.label());
            for (v, w) in row.values.iter().zip(&widths) {
                let _ = write!(s, "  {:>w$}", fmt2(*v));
            }
            s.push('\n');
        }
        s.push('\n');
    }
    if !report.summary.is_empty() {
        let _ = writeln!(s, "LSTM MAPE (%)");
        let _ = writeln!(s, "{:<14}  {:>10}  {:>10}", "Horizon", "raw", "smooth");
        let mut horizons: Vec<usize> = report.summary.iter().map(|m| m.horizon).collect();
        horizons.dedup();
        for h in horizons {
            let get = |p: Preprocessing| {
                report.summary.iter().find(|m| m.horizon == h && m.preprocessing == p).and_then(|m| m.mape)
            };
            let _ = writeln!(
                s,
                "{:<14}  {:>10}  {:>10}",
                horizon_label(h),
                fmt2(get(Preprocessing::Raw)),
                fmt2(get(Preprocessing::Smooth))
            );
        }
    }
    s
}

fn render_csv(report: &Report) -> String {
    let mut s = String::new();
    s.push_str(REPORT_CSV_HEADER);
    s.push('\n');
    let val = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let quote = |t: &str| {
        if t.contains([',', '"', '\n']) {
            format!("\"{}\"", t.replace('"', "\"\""))
        } else {
            t.to_string()
        }
    };
    for m in &report.matrices {
        for row in &m.rows {
            for ((d, p), v) in m.columns.iter().zip(&row.values) {
                let _ = writeln!(s, "rmse,{},{},{},{},{},{}", m.case_id, m.horizon, row.model, quote(d), p, val(*v));
            }
        }
    }
    for m in &report.summary {
        let _ = writeln!(s, "lstm_mape,,{},lstm,all,{},{}", m.horizon, m.preprocessing, val(m.mape));
    }
    s
}

pub fn render(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(report),
        ReportFormat::Csv => render_csv(report),
    }
}

/// Convenience wrapper: build and render in one step.
pub fn report(table: &ResultsTable, models: &[ModelKind], format: ReportFormat) -> Result<String> {
    Ok(render(&build_report(table, models)?, format))
}
