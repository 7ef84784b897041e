//! Exact k-NN with the ball tree under each metric, checked against a
//! linear scan.
//!
//! cargo run --example ball_tree_knn

use isokernel::datasets::gen_gaussians;
use isokernel::index::{brute_knn, BallTree, Euclidean, IkFeature, DEFAULT_LEAF_SIZE};
use isokernel::IkModel;

fn main() -> isokernel::Result<()> {
    let ds = gen_gaussians(2, 500, 10.0, 4)?;
    let q = ds.points[0].clone();

    let tree = BallTree::build(ds.points.clone(), Euclidean, DEFAULT_LEAF_SIZE)?;
    let (nn, stats) = tree.query_knn(&q, 5)?;
    let (bf, bstats) = brute_knn(&ds.points, &q, 5, &Euclidean)?;
    println!("euclidean: {nn:?}");
    println!("  same as brute force: {}, evaluations {} vs {}", nn == bf, stats.distance_evaluations, bstats.distance_evaluations);

    let model = IkModel::fit(&ds.points, 16, 200, 4)?;
    let codes = model.encode_all(&ds.points)?;
    let tree = BallTree::build(codes.clone(), IkFeature, DEFAULT_LEAF_SIZE)?;
    let (nn, stats) = tree.query_knn(&codes[0], 5)?;
    let (bf, bstats) = brute_knn(&codes, &codes[0], 5, &IkFeature)?;
    println!("IK feature space: {nn:?}");
    println!("  same as brute force: {}, evaluations {} vs {}", nn == bf, stats.distance_evaluations, bstats.distance_evaluations);
    println!("tree: {} nodes, {} leaves", tree.node_count(), tree.leaf_count());
    Ok(())
}
