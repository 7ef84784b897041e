use crate::kernel::{feature_space_distance, IkCode};
use crate::vector::FeatureVector;

/// A metric over some point type, with a rule for summarizing a group of
/// points by a single centroid point.
pub trait Metric: Sync {
    type Point: Clone + Send + Sync;

    fn name(&self) -> &'static str;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// Centroid of `points[idx]`. The ball tree stores it per node and
    /// measures the covering radius from it.
    fn centroid(&self, points: &[Self::Point], idx: &[usize]) -> Self::Point;
}

/// Euclidean distance on raw vectors; centroid is the coordinate mean.
#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean;

impl Metric for Euclidean {
    type Point = FeatureVector;

    fn name(&self) -> &'static str {
        "distance"
    }

    fn distance(&self, a: &FeatureVector, b: &FeatureVector) -> f64 {
        a.distance(b)
    }

    fn centroid(&self, points: &[FeatureVector], idx: &[usize]) -> FeatureVector {
        mean(points, idx)
    }
}

/// Euclidean distance between vectors scaled to unit norm, so that
/// neighbors agree with the normalized linear kernel. Points must be
/// passed through [`NormalizedLinear::prepare`] first.
#[derive(Clone, Copy, Debug, Default)]
pub struct NormalizedLinear;

impl NormalizedLinear {
    pub fn prepare(points: &[FeatureVector]) -> Vec<FeatureVector> {
        points.iter().map(|p| p.normalized()).collect()
    }
}

impl Metric for NormalizedLinear {
    type Point = FeatureVector;

    fn name(&self) -> &'static str {
        "LK"
    }

    fn distance(&self, a: &FeatureVector, b: &FeatureVector) -> f64 {
        a.distance(b)
    }

    fn centroid(&self, points: &[FeatureVector], idx: &[usize]) -> FeatureVector {
        mean(points, idx)
    }
}

/// Euclidean distance between IK feature maps. A mean of one-hot blocks is
/// not itself a code, so the centroid is the medoid: the member with the
/// smallest maximum distance to the others (lowest index on ties).
#[derive(Clone, Copy, Debug, Default)]
pub struct IkFeature;

impl Metric for IkFeature {
    type Point = IkCode;

    fn name(&self) -> &'static str {
        "IK"
    }

    fn distance(&self, a: &IkCode, b: &IkCode) -> f64 {
        feature_space_distance(a, b).expect("codes from one model")
    }

    fn centroid(&self, points: &[IkCode], idx: &[usize]) -> IkCode {
        let mut best = idx[0];
        let mut best_max = f64::INFINITY;
        for &i in idx {
            let mut worst = 0.0f64;
            for &j in idx {
                worst = worst.max(self.distance(&points[i], &points[j]));
                if worst >= best_max {
                    break;
                }
            }
            if worst < best_max {
                best_max = worst;
                best = i;
            }
        }
        points[best].clone()
    }
}

fn mean(points: &[FeatureVector], idx: &[usize]) -> FeatureVector {
    let dim = points[idx[0]].dim();
    let mut acc = vec![0.0; dim];
    for &i in idx {
        for (j, v) in points[i].iter_stored() {
            acc[j] += v;
        }
    }
    let n = idx.len() as f64;
    acc.iter_mut().for_each(|v| *v /= n);
    FeatureVector::dense(acc).expect("mean of finite vectors")
}
