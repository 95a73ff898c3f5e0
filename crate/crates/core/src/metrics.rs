//! Forecast error metrics.

use crate::error::{Error, Result};

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.is_empty() {
        return Err(Error::invalid_input("metrics need at least one observation"));
    }
    if actual.len() != predicted.len() {
        return Err(Error::invalid_input(format!(
            "length mismatch: {} actual vs {} predicted",
            actual.len(),
            predicted.len()
        )));
    }
    Ok(())
}

/// Root mean squared error.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let sse: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).powi(2)).sum();
    Ok((sse / actual.len() as f64).sqrt())
}

/// Mean absolute error.
pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let sae: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).abs()).sum();
    Ok(sae / actual.len() as f64)
}

/// Mean absolute percentage error, in percent. Zero actuals are an error.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    if let Some(i) = actual.iter().position(|a| *a == 0.0) {
        return Err(Error::DegenerateInput(format!("actual value at position {i} is zero")));
    }
    let total: f64 = actual.iter().zip(predicted).map(|(a, p)| ((a - p) / a).abs()).sum();
    Ok(100.0 * total / actual.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rmse_hand_values() {
        assert_eq!(rmse(&[1., 2.], &[1., 2.]).unwrap(), 0.0);
        assert_abs_diff_eq!(rmse(&[2., 4.], &[1., 3.]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rmse(&[0., 0., 0.], &[3., 0., 0.]).unwrap(), 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn mape_hand_values() {
        assert_eq!(mape(&[5., 7.], &[5., 7.]).unwrap(), 0.0);
        assert_abs_diff_eq!(mape(&[100., 200.], &[110., 180.]).unwrap(), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(rmse(&[], &[]), Err(Error::InvalidInput(_))));
        assert!(matches!(rmse(&[1.], &[1., 2.]), Err(Error::InvalidInput(_))));
        assert!(matches!(mape(&[0., 1.], &[1., 1.]), Err(Error::DegenerateInput(_))));
    }

    proptest! {
        #[test]
        fn rmse_dominates_mae(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..50)) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let r = rmse(&a, &p).unwrap();
            let m = mae(&a, &p).unwrap();
            prop_assert!(m >= 0.0);
            prop_assert!(r >= m - 1e-9 * (1.0 + m));
        }
    }
}
