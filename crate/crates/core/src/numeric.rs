//! Deterministic accumulation helpers.
//!
//! Samples may be evaluated in parallel, but they are always collected in
//! index order and reduced by the same fixed pairwise tree, so results are
//! bit-for-bit reproducible independent of the worker count.

use rayon::prelude::*;

const LEAF: usize = 32;

pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Component-wise pairwise sum of equally sized rows.
pub fn pairwise_sum_rows(rows: &[Vec<f64>], width: usize) -> Vec<f64> {
    if rows.is_empty() {
        return vec![0.0; width];
    }
    if rows.len() <= LEAF {
        let mut acc = vec![0.0; width];
        for row in rows {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        return acc;
    }
    let mid = rows.len() / 2;
    let mut left = pairwise_sum_rows(&rows[..mid], width);
    let right = pairwise_sum_rows(&rows[mid..], width);
    for (l, r) in left.iter_mut().zip(right) {
        *l += r;
    }
    left
}

/// Ordered parallel map over `0..n`.
pub fn ordered_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Least-squares slope of `ln(residual)` against `ln(1/resolution)`, i.e. the
/// observed convergence order.
pub fn loglog_order(resolutions: &[usize], residuals: &[f64]) -> f64 {
    let xs: Vec<f64> = resolutions.iter().map(|&r| -(r as f64).ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
