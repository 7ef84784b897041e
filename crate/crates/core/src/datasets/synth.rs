//! Synthetic two-cluster datasets.

use rand_distr::{Distribution, Normal, StandardNormal};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::rng;
use crate::vector::FeatureVector;

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    /// Two clusters in `R^d`: `N(0, I)` and `N(separation * 1, I)`.
    Gaussians {
        d: usize,
        n_per_cluster: usize,
        separation: f64,
        seed: u64,
    },
    /// Two `w`-dimensional Gaussians in `R^{2w}` on disjoint coordinate
    /// blocks, meeting only at the origin.
    WGaussians {
        w: usize,
        n_per_cluster: usize,
        sd1: f64,
        sd2: f64,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        match *self {
            GeneratorSpec::Gaussians { d, n_per_cluster, separation, .. } => {
                if d == 0 || n_per_cluster == 0 {
                    return bad("d and n must be positive");
                }
                if !separation.is_finite() {
                    return bad("separation must be finite");
                }
            }
            GeneratorSpec::WGaussians { w, n_per_cluster, sd1, sd2, .. } => {
                if w == 0 || n_per_cluster == 0 {
                    return bad("w and n must be positive");
                }
                if !(sd1 > 0.0 && sd2 > 0.0 && sd1.is_finite() && sd2.is_finite()) {
                    return bad("standard deviations must be positive");
                }
            }
        }
        Ok(())
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Dataset> {
    spec.validate()?;
    match *spec {
        GeneratorSpec::Gaussians { d, n_per_cluster, separation, seed } => {
            let mut r = rng::stream(seed, 0);
            let mut points = Vec::with_capacity(2 * n_per_cluster);
            for c in 0..2 {
                let mean = if c == 0 { 0.0 } else { separation };
                for _ in 0..n_per_cluster {
                    let v = (0..d)
                        .map(|_| {
                            let z: f64 = StandardNormal.sample(&mut r);
                            mean + z
                        })
                        .collect();
                    points.push(FeatureVector::dense(v)?);
                }
            }
            Dataset::new(
                format!("gaussians-d{d}"),
                points,
                Some(cluster_labels(n_per_cluster)),
            )
        }
        GeneratorSpec::WGaussians { w, n_per_cluster, sd1, sd2, seed } => {
            let mut r = rng::stream(seed, 0);
            let mut points = Vec::with_capacity(2 * n_per_cluster);
            for (c, sd) in [sd1, sd2].into_iter().enumerate() {
                let normal = Normal::new(0.0, sd).expect("validated sd");
                for _ in 0..n_per_cluster {
                    let mut v = vec![0.0; 2 * w];
                    for x in &mut v[c * w..(c + 1) * w] {
                        *x = normal.sample(&mut r);
                    }
                    points.push(FeatureVector::dense(v)?);
                }
            }
            Dataset::new(
                format!("w-gaussians-w{w}"),
                points,
                Some(cluster_labels(n_per_cluster)),
            )
        }
    }
}

fn cluster_labels(n: usize) -> Vec<i64> {
    (0..2 * n).map(|i| (i / n) as i64).collect()
}

pub fn gen_gaussians(d: usize, n_per_cluster: usize, separation: f64, seed: u64) -> Result<Dataset> {
    generate(&GeneratorSpec::Gaussians { d, n_per_cluster, separation, seed })
}

pub fn gen_w_gaussians(w: usize, n_per_cluster: usize, sd1: f64, sd2: f64, seed: u64) -> Result<Dataset> {
    generate(&GeneratorSpec::WGaussians { w, n_per_cluster, sd1, sd2, seed })
}
