//! Density-peaks clustering under the raw distance and under IK, scored
//! by AMI against the true labels.
//!
//! cargo run --release --example dp_clustering

use isokernel::datasets::{gen_w_gaussians, minmax_normalize};
use isokernel::experiments::{dp_best, eps_grid, MeasureKind};
use isokernel::kernel::PreparedMeasure;

fn main() -> isokernel::Result<()> {
    let ds = minmax_normalize(&gen_w_gaussians(100, 100, 1.0, 1.0, 8)?)?;
    let truth = ds.labels.clone().expect("generated data is labeled");
    for kind in [MeasureKind::Lp { p: 2.0 }, MeasureKind::Ik { psi: 16 }] {
        let spec = kind.fit(&ds.points, 200, 8)?;
        let matrix = PreparedMeasure::new(&spec, &ds.points)?.matrix();
        let r = dp_best(&matrix, 2, &truth, &eps_grid())?;
        println!(
            "{:<12} best eps {:.2}  AMI {:.3}  centers {:?}",
            kind.label(),
            r.eps_fraction,
            r.ami_vs_truth.unwrap_or(f64::NAN),
            r.centers
        );
    }
    Ok(())
}
