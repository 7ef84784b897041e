//! N_eps as the number of partitionings t grows, with partitions drawn
//! from the data or from uniform points on its bounding box.
//!
//! cargo run --release --example t_sweep

use isokernel::datasets::gen_gaussians;
use isokernel::experiments::{cluster_queries, vary_t_sweep, PartitionSource};

fn main() -> isokernel::Result<()> {
    let ds = gen_gaussians(100, 200, 10.0, 2)?;
    let q = cluster_queries(&ds)?.pop().expect("two queries").1;
    let ts = [1, 5, 20, 100, 500];
    for source in [PartitionSource::GivenData, PartitionSource::Uniform] {
        for r in vary_t_sweep(&ds, &q, 16, &ts, 10, source, 0.005, 2)? {
            println!("{:<10} t={:<4} N_eps {:>7.2} +- {:.2}", r.source.name(), r.t, r.mean_n_eps, r.stderr);
        }
    }
    Ok(())
}
