//! Forward moving-average filter.
//!
//! `y[i] = (1/W) * sum_{j=0}^{W-1} x[i+j]`. The last `W-1` outputs average
//! whatever suffix remains, so the output is exactly as long as the input.

use crate::error::{Error, Result};
use crate::series::MonthlySeries;

/// Canonical smoothing window for the price pipeline.
pub const DEFAULT_WINDOW: usize = 10;

pub fn moving_average_filter(series: &MonthlySeries, window: usize) -> Result<MonthlySeries> {
    let smoothed = moving_average(series.values(), window)?;
    MonthlySeries::new(series.start(), smoothed, series.unit())
}

/// Slice form of [`moving_average_filter`].
pub fn moving_average(x: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::invalid_parameter("moving-average window must be >= 1"));
    }
    if x.is_empty() {
        return Err(Error::invalid_input("cannot smooth an empty series"));
    }
    let n = x.len();
    Ok((0..n)
        .map(|i| {
            let tail = &x[i..(i + window).min(n)];
            tail.iter().sum::<f64>() / tail.len() as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_is_fixed_point() {
        assert_eq!(moving_average(&[5.0; 4], 3).unwrap(), vec![5.0; 4]);
    }

    #[test]
    fn shrinking_tail() {
        let y = moving_average(&[1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap();
        for (a, b) in y.iter().zip([1.5, 2.5, 3.5, 4.5, 5.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn window_larger_than_series() {
        let y = moving_average(&[2.0, 4.0], 10).unwrap();
        assert_eq!(y, vec![3.0, 4.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(moving_average(&[1.0], 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(moving_average(&[], 3), Err(Error::InvalidInput(_))));
    }

    proptest! {
        #[test]
        fn window_one_is_identity(x in prop::collection::vec(-1e4f64..1e4, 1..60)) {
            prop_assert_eq!(moving_average(&x, 1).unwrap(), x);
        }

        #[test]
        fn bounded_by_input_range(x in prop::collection::vec(-1e4f64..1e4, 1..60), w in 1usize..15) {
            let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for v in moving_average(&x, w).unwrap() {
                prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
            }
        }

        #[test]
        fn matches_direct_summation(x in prop::collection::vec(-1e3f64..1e3, 1..60), w in 1usize..15) {
            let y = moving_average(&x, w).unwrap();
            for i in 0..x.len() {
                let tail = &x[i..(i + w).min(x.len())];
                let direct = tail.iter().sum::<f64>() / tail.len() as f64;
                prop_assert!((y[i] - direct).abs() < 1e-9);
            }
        }
    }
}
