//! Concentration of a measure around a query: the relative variance of
//! its dissimilarities and the number of near-ties with the nearest
//! neighbor, swept over data dimension.

use crate::datasets::{gen_gaussians, Dataset};
use crate::error::{Error, Result};
use crate::experiments::MeasureKind;
use crate::kernel::{DistanceTable, PreparedMeasure};
use crate::rng;
use crate::vector::FeatureVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryKind {
    BetweenClusters,
    SparseCenter,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::BetweenClusters => "between_clusters",
            QueryKind::SparseCenter => "sparse_center",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstabilityRow {
    pub measure: String,
    pub d: usize,
    pub query_kind: QueryKind,
    pub variance_ratio: f64,
    pub n_epsilon: usize,
    pub epsilon: f64,
    pub seed: u64,
}

/// The two probe queries of a labeled two-cluster dataset: the midpoint of
/// the cluster means, and the mean of cluster 1.
pub fn cluster_queries(ds: &Dataset) -> Result<Vec<(QueryKind, FeatureVector)>> {
    let labels = ds.labels_required("cluster queries")?;
    let mut sums = [vec![0.0; ds.dim], vec![0.0; ds.dim]];
    let mut counts = [0usize; 2];
    for (p, &l) in ds.points.iter().zip(labels) {
        let c = match l {
            0 | 1 => l as usize,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "cluster queries need labels 0/1, found {other}"
                )))
            }
        };
        counts[c] += 1;
        for (j, v) in p.iter_stored() {
            sums[c][j] += v;
        }
    }
    if counts.contains(&0) {
        return Err(Error::InvalidParameter("both clusters must be nonempty".into()));
    }
    let means: Vec<Vec<f64>> = (0..2)
        .map(|c| sums[c].iter().map(|s| s / counts[c] as f64).collect())
        .collect();
    let mid = means[0].iter().zip(&means[1]).map(|(a, b)| (a + b) / 2.0).collect();
    Ok(vec![
        (QueryKind::BetweenClusters, FeatureVector::dense(mid)?),
        (QueryKind::SparseCenter, FeatureVector::dense(means[1].clone())?),
    ])
}

/// `var(m / mean(m))` over the dissimilarities `m`, population variance.
pub fn variance_ratio_of(m: &[f64]) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::Empty("dissimilarities"));
    }
    let mu = m.iter().sum::<f64>() / m.len() as f64;
    if mu == 0.0 {
        return Err(Error::ZeroMean);
    }
    Ok(m.iter().map(|v| (v / mu - 1.0).powi(2)).sum::<f64>() / m.len() as f64)
}

/// Number of dissimilarities below `(1 + epsilon)` times the smallest. The
/// minimum itself always counts, so the result is at least 1 even when the
/// minimum is 0.
pub fn n_epsilon_of(m: &[f64], epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let min = m
        .iter()
        .copied()
        .reduce(f64::min)
        .ok_or(Error::Empty("dissimilarities"))?;
    Ok(m.iter().filter(|&&v| v < (1.0 + epsilon) * min || v <= min).count())
}

pub fn variance_ratio(measure: &PreparedMeasure, q: &FeatureVector) -> Result<f64> {
    variance_ratio_of(&measure.from_query(q)?)
}

pub fn n_epsilon(measure: &PreparedMeasure, q: &FeatureVector, epsilon: f64) -> Result<usize> {
    n_epsilon_of(&measure.from_query(q)?, epsilon)
}

/// Dissimilarities from each query to every point under `kind`. IK models
/// are fitted on `points` with `t` partitionings and `seed`; `table`, if
/// given, must hold distances from `points ++ queries` to `points`.
pub fn query_dissimilarities(
    kind: &MeasureKind,
    points: &[FeatureVector],
    queries: &[FeatureVector],
    table: Option<&DistanceTable>,
    t: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    match *kind {
        MeasureKind::Ik { psi } => {
            let owned;
            let table = match table {
                Some(tb) => tb,
                None => {
                    let rows: Vec<_> = points.iter().chain(queries).cloned().collect();
                    owned = DistanceTable::new(&rows, points)?;
                    &owned
                }
            };
            let n = points.len();
            if table.rows() != n + queries.len() || table.cols() != n {
                return Err(Error::InvalidParameter("distance table does not match points".into()));
            }
            let sets = crate::kernel::IkModel::sample_indices(n, psi, t, seed)?;
            let codes = table.encode(&sets)?;
            let (pc, qc) = codes.split_at(n);
            Ok(qc
                .iter()
                .map(|q| {
                    pc.iter()
                        .map(|c| (t - q.matches(c).expect("same model")) as f64 / t as f64)
                        .collect()
                })
                .collect())
        }
        _ => {
            let spec = kind.fit(points, t, seed)?;
            let prepared = PreparedMeasure::new(&spec, points)?;
            queries.iter().map(|q| prepared.from_query(q)).collect()
        }
    }
}

#[derive(Clone, Debug)]
pub struct InstabilityConfig {
    pub dims: Vec<usize>,
    pub n_per_cluster: usize,
    pub separation: f64,
    pub measures: Vec<MeasureKind>,
    pub t: usize,
    pub epsilon: f64,
    pub seed: u64,
}

/// For each `d`, generates the two-cluster Gaussians set and records the
/// variance ratio and `N_eps` of every measure at both probe queries.
/// Rows are ordered by `(d, measure order, query kind)`.
pub fn instability_sweep(cfg: &InstabilityConfig) -> Result<Vec<InstabilityRow>> {
    let mut rows = Vec::new();
    for &d in &cfg.dims {
        let ds = gen_gaussians(d, cfg.n_per_cluster, cfg.separation, rng::derive(cfg.seed, &[d as u64]))?;
        let (kinds, queries): (Vec<QueryKind>, Vec<FeatureVector>) =
            cluster_queries(&ds)?.into_iter().unzip();
        let table = if cfg.measures.iter().any(|m| matches!(m, MeasureKind::Ik { .. })) {
            let all: Vec<_> = ds.points.iter().chain(&queries).cloned().collect();
            Some(DistanceTable::new(&all, &ds.points)?)
        } else {
            None
        };
        for kind in &cfg.measures {
            let seed = rng::derive(cfg.seed, &[d as u64, kind.key()]);
            let m = query_dissimilarities(kind, &ds.points, &queries, table.as_ref(), cfg.t, seed)?;
            for (qk, values) in kinds.iter().zip(&m) {
                rows.push(InstabilityRow {
                    measure: kind.label(),
                    d,
                    query_kind: *qk,
                    variance_ratio: variance_ratio_of(values)?,
                    n_epsilon: n_epsilon_of(values, cfg.epsilon)?,
                    epsilon: cfg.epsilon,
                    seed: cfg.seed,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{IkModel, MeasureSpec};

    #[test]
    fn equidistant_points_have_zero_variance() {
        assert_eq!(variance_ratio_of(&[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert!(matches!(variance_ratio_of(&[0.0, 0.0]), Err(Error::ZeroMean)));
    }

    #[test]
    fn n_epsilon_examples() {
        assert_eq!(n_epsilon_of(&[0.1, 5.0, 6.0, 7.0], 0.005).unwrap(), 1);
        assert_eq!(n_epsilon_of(&[3.0; 7], 0.005).unwrap(), 7);
        assert_eq!(n_epsilon_of(&[0.0, 0.0, 1.0], 0.005).unwrap(), 2);
        assert_eq!(n_epsilon_of(&[1.0, 1.004, 1.006], 0.005).unwrap(), 2);
        assert!(n_epsilon_of(&[], 0.005).is_err());
        assert!(n_epsilon_of(&[1.0], 0.0).is_err());
    }

    #[test]
    fn queries_of_two_clusters() {
        let ds = gen_gaussians(3, 20, 10.0, 1).unwrap();
        let q = cluster_queries(&ds).unwrap();
        assert_eq!(q[0].0, QueryKind::BetweenClusters);
        for j in 0..3 {
            assert!((q[0].1.get(j) - 5.0).abs() < 1.5);
            assert!((q[1].1.get(j) - 10.0).abs() < 1.5);
        }
    }

    #[test]
    fn fast_ik_path_matches_model() {
        let ds = gen_gaussians(4, 15, 3.0, 2).unwrap();
        let q: Vec<_> = cluster_queries(&ds).unwrap().into_iter().map(|x| x.1).collect();
        let got = query_dissimilarities(&MeasureKind::Ik { psi: 4 }, &ds.points, &q, None, 30, 9).unwrap();
        let spec = MeasureSpec::Ik(IkModel::fit(&ds.points, 4, 30, 9).unwrap());
        let prepared = PreparedMeasure::new(&spec, &ds.points).unwrap();
        for (g, qv) in got.iter().zip(&q) {
            assert_eq!(g, &prepared.from_query(qv).unwrap());
        }
    }

    #[test]
    fn sweep_rows_are_complete() {
        let cfg = InstabilityConfig {
            dims: vec![2, 5],
            n_per_cluster: 10,
            separation: 10.0,
            measures: vec![MeasureKind::Ik { psi: 4 }, MeasureKind::Gaussian { sigma: 5.0 }],
            t: 20,
            epsilon: 0.005,
            seed: 3,
        };
        let rows = instability_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        assert!(rows.iter().all(|r| r.n_epsilon >= 1 && r.variance_ratio >= 0.0));
        assert_eq!(rows, instability_sweep(&cfg).unwrap());
    }
}
