//! CART regression trees.
//!
//! Splits are chosen greedily to minimise the summed squared error of the
//! two children (equivalently, their size-weighted variance). Growth stops
//! at `max_depth`, when a node cannot yield two children of at least
//! `min_leaf` samples, or when its targets are all equal.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{ClassicalError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf { value: f64, n_samples: usize },
    Split { feature: usize, threshold: f64, left: Box<TreeNode>, right: Box<TreeNode> },
}

impl TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value, .. } => return *value,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> Vec<&TreeNode> {
        match self {
            TreeNode::Leaf { .. } => vec![self],
            TreeNode::Split { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }
}

/// Grows a regression tree on rows of `x` against `y`. `max_depth = None`
/// means unlimited.
pub fn tree_fit(x: ArrayView2<'_, f64>, y: &[f64], min_leaf: usize, max_depth: Option<usize>) -> Result<TreeNode> {
    let rows: Vec<usize> = (0..y.len()).collect();
    tree_fit_rows(x, y, &rows, min_leaf, max_depth)
}

/// Like [`tree_fit`] over a multiset of row indices (bootstrap samples may
/// repeat rows).
pub(crate) fn tree_fit_rows(
    x: ArrayView2<'_, f64>,
    y: &[f64],
    rows: &[usize],
    min_leaf: usize,
    max_depth: Option<usize>,
) -> Result<TreeNode> {
    if rows.is_empty() || x.nrows() != y.len() {
        return Err(ClassicalError::InvalidInput("tree needs a non-empty X with one target per row".into()));
    }
    if min_leaf == 0 {
        return Err(ClassicalError::InvalidParameter("min_leaf must be >= 1".into()));
    }
    if rows.len() < min_leaf {
        return Err(ClassicalError::InsufficientData { needed: min_leaf, available: rows.len() });
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(ClassicalError::InvalidInput("tree inputs must be finite".into()));
    }
    let mut rows = rows.to_vec();
    Ok(grow(x, y, &mut rows, min_leaf, max_depth, 0))
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    sse: f64,
}

fn leaf(y: &[f64], rows: &[usize]) -> TreeNode {
    let value = rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64;
    TreeNode::Leaf { value, n_samples: rows.len() }
}

fn grow(
    x: ArrayView2<'_, f64>,
    y: &[f64],
    rows: &mut [usize],
    min_leaf: usize,
    max_depth: Option<usize>,
    depth: usize,
) -> TreeNode {
    let n = rows.len();
    let first = y[rows[0]];
    if max_depth.is_some_and(|d| depth >= d) || n < 2 * min_leaf || rows.iter().all(|&r| y[r] == first) {
        return leaf(y, rows);
    }
    let sum: f64 = rows.iter().map(|&r| y[r]).sum();
    let sum_sq: f64 = rows.iter().map(|&r| y[r] * y[r]).sum();
    let parent_sse = sum_sq - sum * sum / n as f64;

    let mut best: Option<BestSplit> = None;
    let mut order = rows.to_vec();
    for feature in 0..x.ncols() {
        order.sort_by(|&a, &b| x[[a, feature]].total_cmp(&x[[b, feature]]).then(a.cmp(&b)));
        let (mut ls, mut lsq) = (0.0, 0.0);
        for k in 0..n - 1 {
            let yk = y[order[k]];
            ls += yk;
            lsq += yk * yk;
            let left_n = k + 1;
            let right_n = n - left_n;
            if left_n < min_leaf {
                continue;
            }
            if right_n < min_leaf {
                break;
            }
            let (xa, xb) = (x[[order[k], feature]], x[[order[k + 1], feature]]);
            if xa == xb {
                continue;
            }
            let rs = sum - ls;
            let rsq = sum_sq - lsq;
            let sse = (lsq - ls * ls / left_n as f64) + (rsq - rs * rs / right_n as f64);
            if best.as_ref().is_none_or(|b| sse < b.sse) {
                let mid = xa + (xb - xa) / 2.0;
                // Guard against the midpoint rounding onto the upper value.
                let threshold = if mid < xb { mid } else { xa };
                best = Some(BestSplit { feature, threshold, sse });
            }
        }
    }

    match best {
        Some(b) if b.sse < parent_sse - 1e-12 * parent_sse.abs().max(1e-300) => {
            let (mut left, mut right): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&r| x[[r, b.feature]] <= b.threshold);
            TreeNode::Split {
                feature: b.feature,
                threshold: b.threshold,
                left: Box::new(grow(x, y, &mut left, min_leaf, max_depth, depth + 1)),
                right: Box::new(grow(x, y, &mut right, min_leaf, max_depth, depth + 1)),
            }
        }
        _ => leaf(y, rows),
    }
}
