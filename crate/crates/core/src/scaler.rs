use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-column min-max scaler onto `[0, 1]`.
///
/// Constant columns map to 0 and invert back to their single observed value.
/// Data outside the fitted range is mapped linearly outside `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl MinMaxScaler {
    /// Fits on the rows of `data` (rows are observations, columns features).
    pub fn fit(data: ArrayView2<'_, f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::invalid_input("cannot fit a scaler on empty data"));
        }
        let mut min = Vec::with_capacity(data.ncols());
        let mut max = Vec::with_capacity(data.ncols());
        for col in data.axis_iter(Axis(1)) {
            let (lo, hi) = col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid_input("scaler fit data contains non-finite values"));
            }
            min.push(lo);
            max.push(hi);
        }
        Ok(Self { min, max })
    }

    /// Builds a scaler from explicit bounds.
    pub fn from_bounds(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() || min.is_empty() {
            return Err(Error::invalid_input("scaler bounds must be non-empty and equally long"));
        }
        if min.iter().zip(&max).any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && hi >= lo)) {
            return Err(Error::invalid_input("scaler bounds must be finite with max >= min"));
        }
        Ok(Self { min, max })
    }

    pub fn n_columns(&self) -> usize {
        self.min.len()
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn apply_value(&self, col: usize, v: f64) -> f64 {
        let span = self.max[col] - self.min[col];
        if span > 0.0 {
            (v - self.min[col]) / span
        } else {
            0.0
        }
    }

    pub fn invert_value(&self, col: usize, v: f64) -> f64 {
        let span = self.max[col] - self.min[col];
        if span > 0.0 {
            v * span + self.min[col]
        } else {
            self.min[col]
        }
    }

    pub fn apply(&self, data: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check(data.ncols())?;
        let mut out = data.to_owned();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            col.mapv_inplace(|v| self.apply_value(j, v));
        }
        Ok(out)
    }

    pub fn invert(&self, data: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check(data.ncols())?;
        let mut out = data.to_owned();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            col.mapv_inplace(|v| self.invert_value(j, v));
        }
        Ok(out)
    }

    fn check(&self, ncols: usize) -> Result<()> {
        if ncols != self.n_columns() {
            return Err(Error::invalid_input(format!("scaler fitted on {} columns, got {ncols}", self.n_columns())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn midpoint_and_constant_column() {
        let s = MinMaxScaler::fit(array![[0.0, 3.0], [10.0, 3.0]].view()).unwrap();
        let out = s.apply(array![[5.0, 3.0]].view()).unwrap();
        assert_eq!(out, array![[0.5, 0.0]]);
    }

    #[test]
    fn out_of_range_test_value_round_trips() {
        let s = MinMaxScaler::fit(array![[0.0], [10.0]].view()).unwrap();
        let scaled = s.apply(array![[12.0]].view()).unwrap();
        assert!((scaled[[0, 0]] - 1.2).abs() < 1e-12);
        let back = s.invert(scaled.view()).unwrap();
        assert!((back[[0, 0]] - 12.0).abs() < 1e-12);
    }

    #[test]
    fn column_mismatch() {
        let s = MinMaxScaler::fit(array![[0.0], [1.0]].view()).unwrap();
        assert!(matches!(s.apply(array![[0.0, 1.0]].view()), Err(Error::InvalidInput(_))));
        assert!(MinMaxScaler::fit(Array2::<f64>::zeros((0, 2)).view()).is_err());
    }

    proptest! {
        #[test]
        fn invert_after_apply_is_identity(rows in 2usize..12, cols in 1usize..5, seed in prop::collection::vec(-1e3f64..1e3, 60)) {
            let data = Array2::from_shape_fn((rows, cols), |(i, j)| seed[(i * cols + j) % seed.len()] + (i * 7 + j) as f64);
            let s = MinMaxScaler::fit(data.view()).unwrap();
            let back = s.invert(s.apply(data.view()).unwrap().view()).unwrap();
            for j in 0..cols {
                if s.max()[j] > s.min()[j] {
                    for i in 0..rows {
                        prop_assert!((back[[i, j]] - data[[i, j]]).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}
