//! Concentration of GK versus IK as the dimension grows.
//!
//! cargo run --release --example instability

use isokernel::experiments::{instability_sweep, InstabilityConfig, MeasureKind};

fn main() -> isokernel::Result<()> {
    let cfg = InstabilityConfig {
        dims: vec![10, 100, 1000],
        n_per_cluster: 200,
        separation: 10.0,
        measures: vec![MeasureKind::Gaussian { sigma: 5.0 }, MeasureKind::Ik { psi: 16 }],
        t: 200,
        epsilon: 0.005,
        seed: 1,
    };
    println!("{:<12} {:>6} {:<17} {:>12} {:>6}", "measure", "d", "query", "var ratio", "N_eps");
    for r in instability_sweep(&cfg)? {
        println!(
            "{:<12} {:>6} {:<17} {:>12.3e} {:>6}",
            r.measure,
            r.d,
            r.query_kind.name(),
            r.variance_ratio,
            r.n_epsilon
        );
    }
    Ok(())
}
