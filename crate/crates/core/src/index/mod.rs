//! Exact k-nearest-neighbor search: a metric ball tree, a linear-scan
//! reference, retrieval precision and a distance-evaluation benchmark.

mod metric;
mod tree;

use std::io::Write;

use rayon::prelude::*;

pub use metric::{Euclidean, IkFeature, Metric, NormalizedLinear};
pub use tree::{brute_knn, BallTree, Neighbor, QueryStats, DEFAULT_LEAF_SIZE};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::kernel::IkModel;
use crate::vector::FeatureVector;

/// The metric a dataset is searched under.
#[derive(Clone, Debug)]
pub enum MetricSpace {
    RawEuclidean,
    NormalizedLinear,
    /// IK feature maps under the given model.
    IkFeature(IkModel),
}

impl MetricSpace {
    pub fn name(&self) -> &'static str {
        match self {
            MetricSpace::RawEuclidean => Euclidean.name(),
            MetricSpace::NormalizedLinear => NormalizedLinear.name(),
            MetricSpace::IkFeature(_) => IkFeature.name(),
        }
    }
}

/// Builds the tree for `space` over `points` and hands it, with the
/// queries mapped into the same space, to `f`.
macro_rules! with_space {
    ($space:expr, $points:expr, $queries:expr, $leaf:expr, |$tree:ident, $qs:ident| $body:expr) => {
        match $space {
            MetricSpace::RawEuclidean => {
                let $tree = BallTree::build($points.to_vec(), Euclidean, $leaf)?;
                let $qs: Vec<FeatureVector> = $queries.to_vec();
                $body
            }
            MetricSpace::NormalizedLinear => {
                let $tree = BallTree::build(NormalizedLinear::prepare($points), NormalizedLinear, $leaf)?;
                let $qs = NormalizedLinear::prepare($queries);
                $body
            }
            MetricSpace::IkFeature(model) => {
                let codes = $points
                    .par_iter()
                    .map(|p| model.encode(p))
                    .collect::<Result<Vec<_>>>()?;
                let $tree = BallTree::build(codes, IkFeature, $leaf)?;
                let $qs = $queries
                    .par_iter()
                    .map(|p| model.encode(p))
                    .collect::<Result<Vec<_>>>()?;
                $body
            }
        }
    };
}

/// k nearest indexed points for every query, using the ball tree.
pub fn knn(
    points: &[FeatureVector],
    queries: &[FeatureVector],
    space: &MetricSpace,
    k: usize,
    leaf_size: usize,
) -> Result<Vec<Vec<Neighbor>>> {
    with_space!(space, points, queries, leaf_size, |tree, qs| {
        qs.par_iter()
            .map(|q| tree.query_knn(q, k).map(|(r, _)| r))
            .collect()
    })
}

/// Mean fraction of each point's `k` nearest neighbors (itself excluded)
/// that share its label.
pub fn precision_at_k(ds: &Dataset, space: &MetricSpace, k: usize) -> Result<f64> {
    let labels = ds.labels_required("precision@k")?;
    if ds.len() <= k {
        return Err(Error::KOutOfRange { k, n: ds.len() });
    }
    with_space!(space, &ds.points, &ds.points, DEFAULT_LEAF_SIZE, |tree, qs| {
        precision_with_tree(&tree, &qs, labels, k)
    })
}

fn precision_with_tree<M: Metric>(
    tree: &BallTree<M>,
    queries: &[M::Point],
    labels: &[i64],
    k: usize,
) -> Result<f64> {
    check_k(k + 1, tree.len())?;
    let hits = queries
        .par_iter()
        .enumerate()
        .map(|(i, q)| {
            let (mut nn, _) = tree.query_knn(q, k + 1)?;
            match nn.iter().position(|&(j, _)| j == i) {
                Some(pos) => {
                    nn.remove(pos);
                }
                None => {
                    nn.pop();
                }
            }
            Ok(nn.iter().filter(|&&(j, _)| labels[j] == labels[i]).count())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(hits.iter().sum::<usize>() as f64 / (k * queries.len()) as f64)
}

fn check_k(k: usize, n: usize) -> Result<()> {
    tree::check_k(k, n)
}

/// Aggregate cost of one search method over a query set.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodStats {
    pub total_distance_evals: u64,
    pub mean_wall_us: f64,
}

/// Brute force versus ball tree over the same queries.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub metric: String,
    pub brute: MethodStats,
    pub tree: MethodStats,
}

/// Runs every point of `ds` as a `k`-NN query through both methods and
/// checks that they agree.
pub fn bench_index(ds: &Dataset, space: &MetricSpace, k: usize, leaf_size: usize) -> Result<BenchReport> {
    if ds.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let (brute, tree) = with_space!(space, &ds.points, &ds.points, leaf_size, |tree, qs| {
        bench_with_tree(&tree, &qs, k)
    })?;
    Ok(BenchReport {
        metric: space.name().to_string(),
        brute,
        tree,
    })
}

/// Brute force versus a ball tree built over `points`, each point used as
/// a query. Fails if the two ever disagree.
pub fn bench_points<M: Metric>(
    points: Vec<M::Point>,
    metric: M,
    k: usize,
    leaf_size: usize,
) -> Result<(MethodStats, MethodStats)> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    let tree = BallTree::build(points, metric, leaf_size)?;
    bench_with_tree(&tree, tree.points(), k)
}

fn bench_with_tree<M: Metric>(
    tree: &BallTree<M>,
    queries: &[M::Point],
    k: usize,
) -> Result<(MethodStats, MethodStats)> {
    let mut brute = Vec::with_capacity(queries.len());
    let mut indexed = Vec::with_capacity(queries.len());
    for q in queries {
        let (rb, sb) = brute_knn(tree.points(), q, k, tree.metric())?;
        let (rt, st) = tree.query_knn(q, k)?;
        debug_assert_eq!(rb, rt);
        if rb != rt {
            return Err(Error::InvalidParameter(
                "ball tree disagrees with brute force".into(),
            ));
        }
        brute.push(sb);
        indexed.push(st);
    }
    Ok((aggregate(&brute), aggregate(&indexed)))
}

fn aggregate(stats: &[QueryStats]) -> MethodStats {
    let evals = stats.iter().map(|s| s.distance_evaluations).sum();
    let wall: f64 = stats.iter().map(|s| s.wall_time.as_secs_f64() * 1e6).sum();
    MethodStats {
        total_distance_evals: evals,
        mean_wall_us: wall / stats.len().max(1) as f64,
    }
}

/// CSV `query_id,rank,neighbor_id,distance`; ranks start at 1.
pub fn write_knn_csv<W: Write>(results: &[Vec<Neighbor>], comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "query_id,rank,neighbor_id,distance")?;
    for (q, row) in results.iter().enumerate() {
        for (rank, (j, d)) in row.iter().enumerate() {
            writeln!(out, "{q},{},{j},{d}", rank + 1)?;
        }
    }
    Ok(())
}

/// CSV `method,metric,total_distance_evals,mean_wall_us`.
pub fn write_bench_csv<W: Write>(reports: &[BenchReport], comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "method,metric,total_distance_evals,mean_wall_us")?;
    for r in reports {
        for (method, s) in [("brute", &r.brute), ("balltree", &r.tree)] {
            writeln!(
                out,
                "{method},{},{},{:.3}",
                r.metric, s.total_distance_evals, s.mean_wall_us
            )?;
        }
    }
    Ok(())
}
