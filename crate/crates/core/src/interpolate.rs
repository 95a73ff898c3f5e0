use crate::calendar::YearMonth;
use crate::error::{Error, Result};
use crate::series::{MonthlySeries, YearlySeries};

/// Spreads yearly observations over months.
///
/// Each yearly value sits at January of its year, months between two
/// anchors are linear interpolants, and the months after the final anchor
/// hold the final value, giving `12 * n_years` months in total.
pub fn interpolate_yearly_to_monthly(series: &YearlySeries) -> Result<MonthlySeries> {
    let years = series.values();
    if years.is_empty() {
        return Err(Error::invalid_input("cannot interpolate an empty yearly series"));
    }
    let mut monthly = Vec::with_capacity(12 * years.len());
    for pair in years.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        for m in 0..12 {
            monthly.push(a + (b - a) * m as f64 / 12.0);
        }
    }
    let last = *years.last().unwrap();
    monthly.extend(std::iter::repeat_n(last, 12));
    MonthlySeries::new(YearMonth::new(series.start_year(), 1)?, monthly, "")
}
