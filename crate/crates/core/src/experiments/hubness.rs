//! k-occurrence distributions: how often each point appears in the k-NN
//! lists of the others.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::experiments::{stats, MeasureKind};
use crate::kernel::{k_smallest, PreparedMeasure};
use crate::rng;
use crate::vector::FeatureVector;

#[derive(Clone, Debug, PartialEq)]
pub struct HubnessRow {
    pub measure: String,
    pub d: usize,
    pub o_k: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HubnessResult {
    /// `O_k(x)` for every point.
    pub o_k: Vec<usize>,
    pub skewness: f64,
    /// `p(O_k = v)` for every observed `v`, ascending.
    pub histogram: Vec<(usize, f64)>,
}

/// `O_k` of every point from a full dissimilarity matrix. Each point's own
/// entry is excluded; ties go to the lower index.
pub fn k_occurrences(matrix: &[Vec<f64>], k: usize) -> Result<Vec<usize>> {
    let n = matrix.len();
    if k == 0 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut occ = vec![0; n];
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Error::LengthMismatch(row.len(), n));
        }
        for j in k_smallest(row, k, Some(i)) {
            occ[j] += 1;
        }
    }
    Ok(occ)
}

pub fn hubness(points: &[FeatureVector], kind: &MeasureKind, k: usize, t: usize, seed: u64) -> Result<HubnessResult> {
    let spec = kind.fit(points, t, seed)?;
    let matrix = PreparedMeasure::new(&spec, points)?.matrix();
    let o_k = k_occurrences(&matrix, k)?;
    let values: Vec<f64> = o_k.iter().map(|&v| v as f64).collect();
    let mut counts = BTreeMap::new();
    for &v in &o_k {
        *counts.entry(v).or_insert(0usize) += 1;
    }
    let n = o_k.len() as f64;
    Ok(HubnessResult {
        skewness: stats::skewness(&values),
        histogram: counts.into_iter().map(|(v, c)| (v, c as f64 / n)).collect(),
        o_k,
    })
}

/// `n` points uniform on `[0, 1]^d` for each `d`; one result per
/// `(d, measure)`, ordered by `d` then measure.
pub fn hubness_sweep(
    dims: &[usize],
    n: usize,
    k: usize,
    measures: &[MeasureKind],
    t: usize,
    seed: u64,
) -> Result<Vec<(usize, MeasureKind, HubnessResult)>> {
    let mut out = Vec::new();
    for &d in dims {
        let mut r = rng::stream(rng::derive(seed, &[d as u64]), 0);
        let points = (0..n)
            .map(|_| FeatureVector::dense((0..d).map(|_| r.random::<f64>()).collect()))
            .collect::<Result<Vec<_>>>()?;
        for kind in measures {
            let res = hubness(&points, kind, k, t, rng::derive(seed, &[d as u64, kind.key()]))?;
            out.push((d, kind.clone(), res));
        }
    }
    Ok(out)
}

impl HubnessResult {
    pub fn rows(&self, measure: &str, d: usize) -> Vec<HubnessRow> {
        self.histogram
            .iter()
            .map(|&(o_k, p)| HubnessRow {
                measure: measure.to_string(),
                d,
                o_k,
                p,
            })
            .collect()
    }
}
