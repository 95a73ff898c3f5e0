//! Line charts as standalone SVG. Output depends only on the inputs, so the
//! same series always produce the same bytes.

use std::fmt::Write as _;
use std::path::Path;

use pricecast_core::{MonthlySeries, YearMonth};

use crate::error::{ExperimentError, Result};

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"];
const ACTUAL_COLOUR: &str = "#1f77b4";

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Roughly `target` round tick values covering [lo, hi].
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::EPSILON);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        out.push(t);
        t += step;
    }
    out
}

/// Renders `actual` with every overlay on shared axes. Overlays must lie
/// inside the actual series' date range.
pub fn render_svg(title: &str, actual: &MonthlySeries, overlays: &[(String, MonthlySeries)]) -> Result<String> {
    if actual.is_empty() {
        return Err(ExperimentError::InvalidParameter("nothing to plot".into()));
    }
    let (start, end) = (actual.start(), actual.end());
    for (name, s) in overlays {
        if !s.is_empty() && (s.start() < start || s.end() > end) {
            return Err(ExperimentError::InvalidParameter(format!(
                "overlay '{name}' spans {}..{}, outside {start}..{end}",
                s.start(),
                s.end()
            )));
        }
    }
    let finite = |s: &MonthlySeries| s.values().iter().copied().filter(|v| v.is_finite()).collect::<Vec<_>>();
    let mut all = finite(actual);
    for (_, s) in overlays {
        all.extend(finite(s));
    }
    let (mut lo, mut hi) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return Err(ExperimentError::InvalidParameter("no finite values to plot".into()));
    }
    if hi - lo < 1e-9 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = (hi - lo) * 0.05;
    let (lo, hi) = (lo - pad, hi + pad);

    let months = start.months_until(end).max(1) as f64;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x_of = |d: YearMonth| LEFT + start.months_until(d) as f64 / months * plot_w;
    let y_of = |v: f64| TOP + (hi - v) / (hi - lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    for v in ticks(lo, hi, 6) {
        let y = y_of(v);
        let _ =
            writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##, WIDTH - RIGHT);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            format_tick(v)
        );
    }
    let years = (end.year() - start.year() + 1) as usize;
    let every = years.div_ceil(16).max(1);
    for (i, year) in (start.year()..=end.year()).enumerate() {
        let jan = YearMonth::new(year, 1).map_err(ExperimentError::Data)?;
        if jan < start || i % every != 0 {
            continue;
        }
        let x = x_of(jan);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##,
            TOP + plot_h,
            TOP + plot_h + 5.0
        );
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{year}</text>"#, TOP + plot_h + 20.0);
    }
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#333"/>"##
    );

    let mut series: Vec<(&str, &MonthlySeries, &str)> = vec![("actual", actual, ACTUAL_COLOUR)];
    for (i, (name, o)) in overlays.iter().enumerate() {
        series.push((name.as_str(), o, PALETTE[i % PALETTE.len()]));
    }
    for (_, data, colour) in &series {
        let mut path = String::new();
        let mut pen_down = false;
        for (i, &v) in data.values().iter().enumerate() {
            if !v.is_finite() {
                pen_down = false;
                continue;
            }
            let cmd = if pen_down { 'L' } else { 'M' };
            let _ = write!(path, "{cmd}{:.2},{:.2} ", x_of(data.date_at(i)), y_of(v));
            pen_down = true;
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, path.trim_end());
    }

    for (i, (name, _, colour)) in series.iter().enumerate() {
        let y = TOP + 14.0 + 16.0 * i as f64;
        let x = LEFT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"/>"#,
            y - 4.0,
            x + 20.0,
            y - 4.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, x + 26.0, escape(name));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn format_tick(v: f64) -> String {
    if v.abs() >= 100.0 || v == v.round() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

pub fn plot_series(
    title: &str,
    actual: &MonthlySeries,
    overlays: &[(String, MonthlySeries)],
    path: &Path,
) -> Result<()> {
    let svg = render_svg(title, actual, overlays)?;
    std::fs::write(path, svg).map_err(|e| ExperimentError::io(path, e))
}
