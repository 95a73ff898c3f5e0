//! Strict CSV readers and writers for price and covariate files.
//!
//! Price files carry the header `date,price` with `YYYY-MM` dates. Covariate
//! files carry `date,value` with either `YYYY-MM` (monthly) or `YYYY`
//! (yearly) dates. Rows must be consecutive: gaps, duplicates, reordering and
//! extra columns are all rejected.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::calendar::YearMonth;
use crate::error::{Error, Result};
use crate::series::{MonthlySeries, YearlySeries};

#[derive(Debug, Clone, PartialEq)]
pub enum CovariateSeries {
    Monthly(MonthlySeries),
    Yearly(YearlySeries),
}

pub fn read_price_csv(path: impl AsRef<Path>) -> Result<MonthlySeries> {
    let path = path.as_ref();
    parse_price_csv(File::open(path)?, &path.display().to_string())
}

pub fn read_covariate_csv(path: impl AsRef<Path>) -> Result<CovariateSeries> {
    let path = path.as_ref();
    parse_covariate_csv(File::open(path)?, &path.display().to_string())
}

pub fn parse_price_csv<R: Read>(reader: R, origin: &str) -> Result<MonthlySeries> {
    let rows = read_rows(reader, origin, "price")?;
    let (start, values) = monthly_from_rows(&rows, origin)?;
    MonthlySeries::new(start, values, "price").map_err(|e| parse_err(origin, e.to_string()))
}

pub fn parse_covariate_csv<R: Read>(reader: R, origin: &str) -> Result<CovariateSeries> {
    let rows = read_rows(reader, origin, "value")?;
    if rows[0].1.len() == 4 {
        let mut values = Vec::with_capacity(rows.len());
        let mut start = None;
        for (line, date, v) in &rows {
            let year: i32 = (date.len() == 4 && date.bytes().all(|b| b.is_ascii_digit()))
                .then(|| date.parse().ok())
                .flatten()
                .ok_or_else(|| parse_err(origin, format!("line {line}: expected YYYY date, got {date:?}")))?;
            let start_year = *start.get_or_insert(year);
            let expected = start_year + values.len() as i32;
            if year != expected {
                return Err(parse_err(
                    origin,
                    format!("line {line}: expected year {expected}, got {year} (gap or duplicate)"),
                ));
            }
            values.push(*v);
        }
        let series = YearlySeries::new(start.unwrap(), values).map_err(|e| parse_err(origin, e.to_string()))?;
        Ok(CovariateSeries::Yearly(series))
    } else {
        let (start, values) = monthly_from_rows(&rows, origin)?;
        let series = MonthlySeries::new(start, values, "").map_err(|e| parse_err(origin, e.to_string()))?;
        Ok(CovariateSeries::Monthly(series))
    }
}

fn parse_err(origin: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: origin.to_string(), message: message.into() }
}

/// Returns `(line, date, value)` triples after header validation.
fn read_rows<R: Read>(reader: R, origin: &str, value_column: &str) -> Result<Vec<(u64, String, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(origin, e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != value_column {
        return Err(parse_err(
            origin,
            format!("expected header `date,{value_column}`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(origin, e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(parse_err(origin, format!("line {line}: expected 2 fields, got {}", rec.len())));
        }
        let value: f64 =
            rec[1].parse().map_err(|_| parse_err(origin, format!("line {line}: bad number {:?}", &rec[1])))?;
        if !value.is_finite() {
            return Err(parse_err(origin, format!("line {line}: non-finite value")));
        }
        rows.push((line, rec[0].to_string(), value));
    }
    if rows.is_empty() {
        return Err(parse_err(origin, "no data rows"));
    }
    Ok(rows)
}

fn monthly_from_rows(rows: &[(u64, String, f64)], origin: &str) -> Result<(YearMonth, Vec<f64>)> {
    let mut start: Option<YearMonth> = None;
    let mut values = Vec::with_capacity(rows.len());
    for (line, date, v) in rows {
        let ym: YearMonth = date.parse().map_err(|e: Error| parse_err(origin, format!("line {line}: {e}")))?;
        let first = *start.get_or_insert(ym);
        let expected = first.add_months(values.len() as i64);
        if ym != expected {
            return Err(parse_err(origin, format!("line {line}: expected {expected}, got {ym} (gap or duplicate)")));
        }
        values.push(*v);
    }
    Ok((start.unwrap(), values))
}

pub fn write_monthly_csv<W: Write>(writer: W, series: &MonthlySeries, value_column: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["date", value_column]).map_err(csv_io)?;
    for (i, v) in series.values().iter().enumerate() {
        w.write_record([series.date_at(i).to_string(), v.to_string()]).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_yearly_csv<W: Write>(writer: W, series: &YearlySeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["date", "value"]).map_err(csv_io)?;
    for (i, v) in series.values().iter().enumerate() {
        w.write_record([format!("{:04}", series.start_year() + i as i32), v.to_string()]).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
