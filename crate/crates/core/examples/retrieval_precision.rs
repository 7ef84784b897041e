//! Precision of the 5 nearest neighbors and ball-tree cost, per metric.
//!
//! cargo run --release --example retrieval_precision

use isokernel::datasets::gen_w_gaussians;
use isokernel::index::{bench_index, precision_at_k, MetricSpace, DEFAULT_LEAF_SIZE};
use isokernel::IkModel;

fn main() -> isokernel::Result<()> {
    let ds = gen_w_gaussians(50, 200, 1.0, 32f64.sqrt(), 11)?;
    let spaces = [
        MetricSpace::RawEuclidean,
        MetricSpace::NormalizedLinear,
        MetricSpace::IkFeature(IkModel::fit(&ds.points, 2, 200, 11)?),
        MetricSpace::IkFeature(IkModel::fit(&ds.points, 32, 200, 11)?),
    ];
    for space in &spaces {
        let p = precision_at_k(&ds, space, 5)?;
        let b = bench_index(&ds, space, 5, DEFAULT_LEAF_SIZE)?;
        let psi = match space {
            MetricSpace::IkFeature(m) => format!(" psi={}", m.psi()),
            _ => String::new(),
        };
        println!(
            "{}{psi}: precision@5 {p:.3}, evaluations tree {} / brute {}",
            space.name(),
            b.tree.total_distance_evals,
            b.brute.total_distance_evals
        );
    }
    Ok(())
}
