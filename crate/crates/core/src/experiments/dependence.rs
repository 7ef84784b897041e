//! Data dependence of IK: at equal Euclidean distance, pairs in a sparse
//! region are more similar than pairs in a dense region.

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::experiments::stats;
use crate::kernel::IkModel;
use crate::rng;
use crate::vector::FeatureVector;

#[derive(Clone, Debug, PartialEq)]
pub struct DependenceReport {
    /// Set when `psi = 1`: every pair shares the single cell, nothing to
    /// compare.
    pub degenerate: bool,
    pub matched_pairs: usize,
    pub tolerance: f64,
    pub mean_sparse: f64,
    pub mean_dense: f64,
    pub stderr_sparse: f64,
    pub stderr_dense: f64,
}

impl DependenceReport {
    pub fn gap(&self) -> f64 {
        self.mean_sparse - self.mean_dense
    }

    pub fn pooled_stderr(&self) -> f64 {
        stats::pooled_stderr(self.stderr_sparse, self.stderr_dense)
    }

    /// `gap / pooled stderr`.
    pub fn gap_in_stderrs(&self) -> f64 {
        self.gap() / self.pooled_stderr()
    }
}

/// Two Gaussian regions of `n` points in the plane, spreads `dense_spread`
/// and `sparse_spread`, centered far enough apart not to interact. IK is
/// fitted on their union. Within-region pairs are matched across regions
/// by Euclidean distance (greedily, in order of distance, within
/// `tolerance = 0.01 * dense_spread`) and the IK similarities of matched
/// pairs are averaged per region. Each point joins at most one matched
/// pair, so the per-region samples have no shared points.
pub fn data_dependence_test(
    dense_spread: f64,
    sparse_spread: f64,
    n: usize,
    psi: usize,
    t: usize,
    seed: u64,
) -> Result<DependenceReport> {
    if !(dense_spread > 0.0 && sparse_spread >= dense_spread) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < dense spread <= sparse spread, got {dense_spread} and {sparse_spread}"
        )));
    }
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let tolerance = 0.01 * dense_spread;
    if psi == 1 {
        return Ok(DependenceReport {
            degenerate: true,
            matched_pairs: 0,
            tolerance,
            mean_sparse: 1.0,
            mean_dense: 1.0,
            stderr_sparse: 0.0,
            stderr_dense: 0.0,
        });
    }
    let mut r = rng::stream(seed, 0);
    let offset = 20.0 * sparse_spread;
    let mut region = |spread: f64, cx: f64| -> Result<Vec<FeatureVector>> {
        let normal = Normal::new(0.0, spread).expect("positive spread");
        (0..n)
            .map(|_| FeatureVector::dense(vec![cx + normal.sample(&mut r), normal.sample(&mut r)]))
            .collect()
    };
    let dense = region(dense_spread, 0.0)?;
    let sparse = region(sparse_spread, offset)?;
    let all: Vec<_> = dense.iter().chain(&sparse).cloned().collect();
    let model = IkModel::fit(&all, psi, t, rng::derive(seed, &[1]))?;
    let codes = model.encode_all(&all)?;
    let (dc, sc) = codes.split_at(n);

    let pairs = |pts: &[FeatureVector]| {
        let mut v = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                v.push((pts[i].distance(&pts[j]), i, j));
            }
        }
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        v
    };
    let dp = pairs(&dense);
    let sp = pairs(&sparse);
    let (mut a, mut b) = (0, 0);
    let mut sims_dense = Vec::new();
    let mut sims_sparse = Vec::new();
    let mut used_dense = vec![false; n];
    let mut used_sparse = vec![false; n];
    while a < dp.len() && b < sp.len() {
        let (dd, di, dj) = dp[a];
        let (ds, si, sj) = sp[b];
        if used_dense[di] || used_dense[dj] {
            a += 1;
        } else if used_sparse[si] || used_sparse[sj] {
            b += 1;
        } else if (dd - ds).abs() < tolerance {
            for u in [di, dj] {
                used_dense[u] = true;
            }
            for u in [si, sj] {
                used_sparse[u] = true;
            }
            sims_dense.push(sim(&dc[di], &dc[dj]));
            sims_sparse.push(sim(&sc[si], &sc[sj]));
            a += 1;
            b += 1;
        } else if dd < ds {
            a += 1;
        } else {
            b += 1;
        }
    }
    if sims_dense.is_empty() {
        return Err(Error::NoMatchedPairs(tolerance));
    }
    Ok(DependenceReport {
        degenerate: false,
        matched_pairs: sims_dense.len(),
        tolerance,
        mean_sparse: stats::mean(&sims_sparse),
        mean_dense: stats::mean(&sims_dense),
        stderr_sparse: stats::stderr(&sims_sparse),
        stderr_dense: stats::stderr(&sims_dense),
    })
}

fn sim(a: &crate::kernel::IkCode, b: &crate::kernel::IkCode) -> f64 {
    crate::kernel::similarity(a, b).expect("same model")
}
