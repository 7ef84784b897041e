//! Density-peaks clustering on a precomputed dissimilarity matrix.

use crate::error::{Error, Result};
use crate::experiments::ami;

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterResult {
    pub labels: Vec<usize>,
    /// Center point indices; center `c` carries label `c`.
    pub centers: Vec<usize>,
    pub ami_vs_truth: Option<f64>,
    /// The `eps` fraction used.
    pub eps_fraction: f64,
}

/// `{0.01, 0.02, ..., 0.99}`.
pub fn eps_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

/// Density peaks with `k` clusters.
///
/// `rho_i` counts other points within `eps = eps_fraction * max(m)`.
/// Points are ranked by `rho` (descending, lower index first on ties).
/// `delta_i` is the dissimilarity to the nearest higher-ranked point, and
/// for the top-ranked point its largest dissimilarity. Centers are the `k`
/// largest `rho * delta`; the top-ranked point is always kept as a center
/// since nothing ranks above it. Other points take the label of their
/// nearest higher-ranked point, in rank order.
pub fn dp_cluster(matrix: &[Vec<f64>], k: usize, eps_fraction: f64) -> Result<ClusterResult> {
    let n = matrix.len();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if !(eps_fraction > 0.0 && eps_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps fraction must be in (0, 1], got {eps_fraction}")));
    }
    for row in matrix {
        if row.len() != n {
            return Err(Error::LengthMismatch(row.len(), n));
        }
    }
    let max = matrix.iter().flatten().copied().fold(0.0, f64::max);
    let eps = eps_fraction * max;
    let rho: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && matrix[i][j] < eps).count())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rho[b].cmp(&rho[a]).then(a.cmp(&b)));

    let mut delta = vec![0.0; n];
    let mut parent = vec![usize::MAX; n];
    let top = order[0];
    delta[top] = matrix[top].iter().copied().fold(0.0, f64::max);
    for r in 1..n {
        let i = order[r];
        let mut best = order[0];
        for &j in &order[..r] {
            if matrix[i][j] < matrix[i][best] {
                best = j;
            }
        }
        delta[i] = matrix[i][best];
        parent[i] = best;
    }

    let gamma: Vec<f64> = (0..n).map(|i| rho[i] as f64 * delta[i]).collect();
    let mut by_gamma: Vec<usize> = (0..n).collect();
    by_gamma.sort_by(|&a, &b| gamma[b].total_cmp(&gamma[a]).then(a.cmp(&b)));
    let mut centers: Vec<usize> = by_gamma[..k].to_vec();
    if !centers.contains(&top) {
        centers[k - 1] = top;
    }

    let mut labels = vec![usize::MAX; n];
    for (c, &i) in centers.iter().enumerate() {
        labels[i] = c;
    }
    for &i in &order {
        if labels[i] == usize::MAX {
            labels[i] = labels[parent[i]];
        }
    }
    Ok(ClusterResult {
        labels,
        centers,
        ami_vs_truth: None,
        eps_fraction,
    })
}

/// Runs [`dp_cluster`] at every fraction and keeps the result with the
/// highest AMI against `truth` (the earliest fraction on ties).
pub fn dp_best(matrix: &[Vec<f64>], k: usize, truth: &[i64], fractions: &[f64]) -> Result<ClusterResult> {
    let mut best: Option<ClusterResult> = None;
    for &f in fractions {
        let mut r = dp_cluster(matrix, k, f)?;
        let labels: Vec<i64> = r.labels.iter().map(|&l| l as i64).collect();
        let a = ami(truth, &labels)?;
        r.ami_vs_truth = Some(a);
        if best.as_ref().is_none_or(|b| a > b.ami_vs_truth.expect("set")) {
            best = Some(r);
        }
    }
    best.ok_or(Error::Empty("eps fractions"))
}
