//! Stability of coefficient vectors fitted on different folds.

use std::collections::BTreeSet;

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::solver::predict;

/// Estimation stability: `sum_k ||X^T b_k - X^T b_mean||^2 / (K ||b_mean||^2)`,
/// with `X` features by samples.
pub fn estimation_stability(x: ArrayView2<'_, f64>, betas: &[Vec<f64>]) -> Result<f64> {
    let k = betas.len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least two folds, got {k}")));
    }
    let d = x.nrows();
    if let Some(bad) = betas.iter().find(|b| b.len() != d) {
        return Err(Error::DimensionMismatch(format!(
            "coefficient vector of length {} for {d} features",
            bad.len()
        )));
    }
    let mut mean = Array1::<f64>::zeros(d);
    for b in betas {
        for (m, v) in mean.iter_mut().zip(b) {
            *m += v;
        }
    }
    mean /= k as f64;
    let mean_sq = mean.dot(&mean);
    if mean_sq == 0.0 {
        return Err(Error::UndefinedMetric(
            "mean coefficient vector is zero".into(),
        ));
    }
    let mean_pred = predict(x, mean.view());
    let spread: f64 = betas
        .iter()
        .map(|b| {
            let pred = predict(x, ArrayView1::from(b));
            let diff = pred - &mean_pred;
            diff.dot(&diff)
        })
        .sum();
    Ok(spread / (k as f64 * mean_sq))
}

/// Multi-set Dice coefficient: `K |intersection| / sum_k |S_k|`.
pub fn multiset_dice(supports: &[BTreeSet<usize>]) -> Result<f64> {
    let k = supports.len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least two folds, got {k}")));
    }
    let total: usize = supports.iter().map(BTreeSet::len).sum();
    if total == 0 {
        return Err(Error::UndefinedMetric("every support is empty".into()));
    }
    let common = supports[0]
        .iter()
        .filter(|i| supports[1..].iter().all(|s| s.contains(i)))
        .count();
    Ok((k * common) as f64 / total as f64)
}

pub fn support_set(beta: &[f64]) -> BTreeSet<usize> {
    crate::fusedprox::support(beta).into_iter().collect()
}
