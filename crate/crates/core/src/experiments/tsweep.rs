//! `N_eps` as a function of the number of partitionings `t`.

use rand::Rng;
use rayon::prelude::*;

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::experiments::instability::n_epsilon_of;
use crate::experiments::stats;
use crate::kernel::{DistanceTable, IkModel};
use crate::rng;
use crate::vector::FeatureVector;

/// Where reference points are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionSource {
    /// The dataset itself.
    GivenData,
    /// A fresh sample of the same size, uniform on the dataset's bounding
    /// box.
    Uniform,
}

impl PartitionSource {
    pub fn name(self) -> &'static str {
        match self {
            PartitionSource::GivenData => "given_data",
            PartitionSource::Uniform => "uniform",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TSweepRow {
    pub t: usize,
    pub source: PartitionSource,
    pub mean_n_eps: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// For every trial a fresh model with `max(t_values)` partitionings is
/// fitted; the model for each smaller `t` is its first `t` partitionings.
/// Returns one row per `t` in input order, with the mean and standard error
/// of `N_eps` over trials.
#[allow(clippy::too_many_arguments)]
pub fn vary_t_sweep(
    ds: &Dataset,
    q: &FeatureVector,
    psi: usize,
    t_values: &[usize],
    trials: usize,
    source: PartitionSource,
    epsilon: f64,
    seed: u64,
) -> Result<Vec<TSweepRow>> {
    let t_max = *t_values.iter().max().ok_or(Error::Empty("t values"))?;
    if t_values.contains(&0) {
        return Err(Error::InvalidParameter("t values must be positive".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if ds.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    q.check_dim(ds.dim)?;
    let n = ds.len();
    let rows: Vec<FeatureVector> = ds.points.iter().chain(std::iter::once(q)).cloned().collect();
    let data_table = match source {
        PartitionSource::GivenData => Some(DistanceTable::new(&rows, &ds.points)?),
        PartitionSource::Uniform => None,
    };
    let bbox = bounding_box(&ds.points);
    let src_key = source as u64;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = rng::derive(seed, &[src_key, trial as u64]);
            let owned;
            let table = match &data_table {
                Some(t) => t,
                None => {
                    let pool = uniform_sample(&bbox, n, rng::derive(trial_seed, &[u64::MAX]))?;
                    owned = DistanceTable::new(&rows, &pool)?;
                    &owned
                }
            };
            let sets = IkModel::sample_indices(n, psi, t_max, trial_seed)?;
            let codes = table.encode(&sets)?;
            let (pc, qc) = codes.split_at(n);
            let qc = &qc[0];
            t_values
                .iter()
                .map(|&t| {
                    let m: Vec<f64> = pc
                        .iter()
                        .map(|c| {
                            let matches = c.cells()[..t]
                                .iter()
                                .zip(&qc.cells()[..t])
                                .filter(|(a, b)| a == b)
                                .count();
                            (t - matches) as f64 / t as f64
                        })
                        .collect();
                    n_epsilon_of(&m, epsilon).map(|v| v as f64)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(t_values
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let v: Vec<f64> = per_trial.iter().map(|row| row[i]).collect();
            TSweepRow {
                t,
                source,
                mean_n_eps: stats::mean(&v),
                stderr: stats::stderr(&v),
                trials,
            }
        })
        .collect())
}

fn bounding_box(points: &[FeatureVector]) -> Vec<(f64, f64)> {
    let d = points[0].dim();
    let mut bb = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    for p in points {
        for (j, b) in bb.iter_mut().enumerate() {
            let v = p.get(j);
            b.0 = b.0.min(v);
            b.1 = b.1.max(v);
        }
    }
    bb
}

fn uniform_sample(bbox: &[(f64, f64)], n: usize, seed: u64) -> Result<Vec<FeatureVector>> {
    let mut r = rng::stream(seed, 0);
    (0..n)
        .map(|_| {
            FeatureVector::dense(
                bbox.iter()
                    .map(|&(lo, hi)| lo + (hi - lo) * r.random::<f64>())
                    .collect(),
            )
        })
        .collect()
}
