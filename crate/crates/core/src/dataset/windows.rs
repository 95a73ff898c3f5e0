use ndarray::{s, Array2, Array3, ArrayView2};
use serde::{Deserialize, Serialize};

use super::table::AlignedTable;
use crate::calendar::YearMonth;
use crate::error::{Error, Result};

/// One of the four prediction configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaseSpec {
    pub id: u8,
    pub n_features: usize,
    pub input_months: usize,
    pub horizon: usize,
}

impl CaseSpec {
    pub fn by_id(id: u8) -> Result<Self> {
        canonical_cases()
            .into_iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown case {id}; expected 1..=4")))
    }

    /// Rows needed for a single window.
    pub fn min_rows(&self) -> usize {
        self.input_months + self.horizon
    }

    pub fn uses_covariates(&self) -> bool {
        self.n_features > 1
    }
}

/// The four cases: price-only and all-feature inputs, each for next-month
/// (12 months in) and next-year (24 months in, 12 out) forecasts.
pub fn canonical_cases() -> Vec<CaseSpec> {
    vec![
        CaseSpec { id: 1, n_features: 1, input_months: 12, horizon: 1 },
        CaseSpec { id: 2, n_features: 6, input_months: 12, horizon: 1 },
        CaseSpec { id: 3, n_features: 1, input_months: 24, horizon: 12 },
        CaseSpec { id: 4, n_features: 6, input_months: 24, horizon: 12 },
    ]
}

/// Stride-1 sliding windows over an aligned table.
///
/// `inputs` is `(n_windows, input_months, n_features)` with the target as the
/// last feature; `targets` is `(n_windows, horizon)` and holds target values
/// strictly after each window's last input month.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedWindows {
    inputs: Array3<f64>,
    targets: Array2<f64>,
    feature_names: Vec<String>,
    window_end_dates: Vec<YearMonth>,
}

impl SupervisedWindows {
    /// Assembles windows directly. Shapes must agree.
    pub fn from_parts(
        inputs: Array3<f64>,
        targets: Array2<f64>,
        feature_names: Vec<String>,
        window_end_dates: Vec<YearMonth>,
    ) -> Result<Self> {
        let (n, _, f) = inputs.dim();
        if n == 0 || targets.nrows() != n || window_end_dates.len() != n || feature_names.len() != f {
            return Err(Error::invalid_input("inconsistent supervised window shapes"));
        }
        Ok(Self { inputs, targets, feature_names, window_end_dates })
    }

    pub fn len(&self) -> usize {
        self.inputs.dim().0
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_months(&self) -> usize {
        self.inputs.dim().1
    }

    pub fn n_features(&self) -> usize {
        self.inputs.dim().2
    }

    pub fn horizon(&self) -> usize {
        self.targets.ncols()
    }

    pub fn target_feature(&self) -> usize {
        self.n_features() - 1
    }

    pub fn inputs(&self) -> &Array3<f64> {
        &self.inputs
    }

    pub fn targets(&self) -> &Array2<f64> {
        &self.targets
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn window_end_dates(&self) -> &[YearMonth] {
        &self.window_end_dates
    }

    /// `input_months × n_features` view of window `k`.
    pub fn window(&self, k: usize) -> ArrayView2<'_, f64> {
        self.inputs.slice(s![k, .., ..])
    }

    /// Months predicted by window `k`, in order.
    pub fn target_dates(&self, k: usize) -> Vec<YearMonth> {
        (1..=self.horizon()).map(|h| self.window_end_dates[k].add_months(h as i64)).collect()
    }

    /// Window inputs flattened time-major (`t * n_features + f`).
    pub fn flat_row(&self, k: usize) -> Vec<f64> {
        self.window(k).iter().copied().collect()
    }

    /// Rebuilds the contiguous target series the windows were cut from.
    pub fn target_series(&self) -> Vec<f64> {
        let f = self.target_feature();
        let n = self.len();
        let mut out: Vec<f64> = self.window(0).column(f).to_vec();
        for k in 1..n {
            out.push(self.inputs[[k, self.input_months() - 1, f]]);
        }
        out.extend(self.targets.row(n - 1).iter());
        out
    }
}

/// Cuts `table` into stride-1 windows for `case`.
///
/// Price-only cases read just the target column; all-feature cases require
/// the table to carry exactly `case.n_features` columns.
pub fn build_windows(table: &AlignedTable, case: CaseSpec) -> Result<SupervisedWindows> {
    let view = if case.n_features == 1 {
        table.target_only()
    } else if case.n_features == table.n_features() {
        table.clone()
    } else {
        return Err(Error::invalid_input(format!(
            "case {} needs {} features, table has {}",
            case.id,
            case.n_features,
            table.n_features()
        )));
    };
    if case.input_months == 0 || case.horizon == 0 {
        return Err(Error::invalid_parameter("input months and horizon must be >= 1"));
    }
    let rows = view.len();
    if rows < case.min_rows() {
        return Err(Error::InsufficientData { needed: case.min_rows(), available: rows });
    }
    let n = rows - case.min_rows() + 1;
    let (t_in, nf) = (case.input_months, view.n_features());
    let target_col = nf - 1;
    let inputs = Array3::from_shape_fn((n, t_in, nf), |(k, t, f)| view.feature(k + t, f));
    let targets = Array2::from_shape_fn((n, case.horizon), |(k, h)| view.feature(k + t_in + h, target_col));
    let window_end_dates = (0..n).map(|k| view.date_at(k + t_in - 1)).collect();
    SupervisedWindows::from_parts(inputs, targets, view.feature_names(), window_end_dates)
}

/// The most recent `input_months` rows of `table`, ready for forecasting the
/// months after `table.end()`.
pub fn latest_window(table: &AlignedTable, case: CaseSpec) -> Result<Array2<f64>> {
    let view = if case.n_features == 1 { table.target_only() } else { table.clone() };
    if view.n_features() != case.n_features {
        return Err(Error::invalid_input(format!(
            "case {} needs {} features, table has {}",
            case.id,
            case.n_features,
            view.n_features()
        )));
    }
    if view.len() < case.input_months {
        return Err(Error::InsufficientData { needed: case.input_months, available: view.len() });
    }
    let first = view.len() - case.input_months;
    Ok(Array2::from_shape_fn((case.input_months, case.n_features), |(t, f)| view.feature(first + t, f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::table::Column;

    fn table(n: usize, covs: usize) -> AlignedTable {
        let covariates = (0..covs)
            .map(|c| Column { name: format!("cov{c}"), values: (0..n).map(|i| (1000 * (c + 1) + i) as f64).collect() })
            .collect();
        AlignedTable::new(YearMonth::new(2016, 1).unwrap(), (0..n).map(|i| i as f64).collect(), covariates).unwrap()
    }

    #[test]
    fn canonical_rows() {
        let cases = canonical_cases();
        assert_eq!(cases.len(), 4);
        assert_eq!((cases[0].n_features, cases[0].input_months, cases[0].horizon), (1, 12, 1));
        assert_eq!((cases[1].n_features, cases[1].input_months, cases[1].horizon), (6, 12, 1));
        assert_eq!((cases[2].n_features, cases[2].input_months, cases[2].horizon), (1, 24, 12));
        assert_eq!((cases[3].n_features, cases[3].input_months, cases[3].horizon), (6, 24, 12));
        assert!(CaseSpec::by_id(5).is_err());
    }

    #[test]
    fn window_counts() {
        let t = table(36, 0);
        assert_eq!(build_windows(&t, CaseSpec::by_id(1).unwrap()).unwrap().len(), 24);
        assert_eq!(build_windows(&t, CaseSpec::by_id(3).unwrap()).unwrap().len(), 1);
        let short = table(35, 0);
        match build_windows(&short, CaseSpec::by_id(3).unwrap()) {
            Err(Error::InsufficientData { needed, available }) => assert_eq!((needed, available), (36, 35)),
            other => panic!("expected insufficient data, got {other:?}"),
        }
    }

    #[test]
    fn targets_follow_inputs() {
        let t = table(40, 5);
        let w = build_windows(&t, CaseSpec::by_id(4).unwrap()).unwrap();
        assert_eq!(w.n_features(), 6);
        assert_eq!(w.feature_names().last().unwrap(), "price");
        for k in 0..w.len() {
            for h in 0..12 {
                assert_eq!(w.targets()[[k, h]], t.target()[k + 24 + h]);
            }
            assert_eq!(w.target_dates(k)[0], t.date_at(k + 24));
        }
        assert_eq!(w.target_series(), t.target());
    }

    #[test]
    fn feature_count_mismatch() {
        let t = table(40, 2);
        assert!(matches!(build_windows(&t, CaseSpec::by_id(2).unwrap()), Err(Error::InvalidInput(_))));
        assert_eq!(build_windows(&t, CaseSpec::by_id(1).unwrap()).unwrap().n_features(), 1);
    }

    #[test]
    fn latest_window_takes_tail() {
        let t = table(30, 0);
        let w = latest_window(&t, CaseSpec::by_id(1).unwrap()).unwrap();
        assert_eq!(w.column(0).to_vec(), (18..30).map(|i| i as f64).collect::<Vec<_>>());
    }
}
