//! The measures IK is compared against, as dissimilarities.
//!
//! cargo run --example baseline_measures

use isokernel::kernel::{MeasureSpec, PreparedMeasure};
use isokernel::{FeatureVector, IkModel};

fn main() -> isokernel::Result<()> {
    let points: Vec<FeatureVector> = (0..30)
        .map(|i| FeatureVector::dense(vec![(i % 10) as f64, (i / 10) as f64 * 5.0]))
        .collect::<isokernel::Result<_>>()?;
    let q = FeatureVector::dense(vec![4.5, 0.5])?;
    let specs = vec![
        MeasureSpec::Ik(IkModel::fit(&points, 8, 200, 1)?),
        MeasureSpec::Gaussian { sigma: 5.0 },
        MeasureSpec::Linear,
        MeasureSpec::Lp { p: 0.5 },
        MeasureSpec::Snn { k: 5 },
        MeasureSpec::AdaptiveGaussian { k: 5 },
    ];
    for spec in &specs {
        let m = PreparedMeasure::new(spec, &points)?.from_query(&q)?;
        let (best, v) = m
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        println!("{:<14} nearest point {best:>2} at {v:.4}", spec.label());
    }
    Ok(())
}
