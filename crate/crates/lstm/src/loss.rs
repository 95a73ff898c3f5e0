use ndarray::{Array2, ArrayView2};

use crate::error::{LstmError, Result};

/// Mean absolute error over every entry and its subgradient with respect to
/// `pred`: `sign(pred - target) / count`, zero at ties.
pub fn mae_loss(pred: ArrayView2<'_, f64>, target: ArrayView2<'_, f64>) -> Result<(f64, Array2<f64>)> {
    if pred.dim() != target.dim() {
        return Err(LstmError::InvalidInput(format!(
            "prediction shape {:?} does not match target shape {:?}",
            pred.dim(),
            target.dim()
        )));
    }
    let count = pred.len();
    if count == 0 {
        return Err(LstmError::InvalidInput("empty batch".into()));
    }
    let n = count as f64;
    let mut total = 0.0;
    let mut grad = Array2::zeros(pred.dim());
    ndarray::Zip::from(&mut grad).and(&pred).and(&target).for_each(|g, p, t| {
        let d = p - t;
        total += d.abs();
        *g = if d > 0.0 {
            1.0 / n
        } else if d < 0.0 {
            -1.0 / n
        } else {
            0.0
        };
    });
    Ok((total / n, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn perfect_prediction() {
        let (l, g) = mae_loss(array![[1.0, 2.0]].view(), array![[1.0, 2.0]].view()).unwrap();
        assert_eq!(l, 0.0);
        assert!(g.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn two_sample_batch() {
        // Batch of two scalars: |3-1| = 2 and a tie.
        let (l, g) = mae_loss(array![[3.0], [5.0]].view(), array![[1.0], [5.0]].view()).unwrap();
        assert_eq!(l, 1.0);
        assert_eq!(g, array![[0.5], [0.0]]);
        let (l, g) = mae_loss(array![[3.0]].view(), array![[1.0]].view()).unwrap();
        assert_eq!((l, g[[0, 0]]), (2.0, 1.0));
    }

    #[test]
    fn gradient_entries_in_sign_range() {
        let p = array![[0.1, 0.9, 0.5], [0.3, 0.3, 0.2]];
        let t = array![[0.2, 0.8, 0.5], [0.1, 0.3, 0.7]];
        let (_, g) = mae_loss(p.view(), t.view()).unwrap();
        for v in g.iter() {
            assert!([-1.0 / 6.0, 0.0, 1.0 / 6.0].contains(v));
        }
    }

    #[test]
    fn shape_mismatch() {
        assert!(mae_loss(array![[1.0]].view(), array![[1.0, 2.0]].view()).is_err());
    }
}
