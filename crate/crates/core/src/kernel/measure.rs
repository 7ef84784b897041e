//! Isolation Kernel and the baseline measures it is compared against.
//!
//! Every measure is turned into a dissimilarity `m(x, y)`: kernels give
//! `1 - k(x, y)` with `k` normalized to `[0, 1]`, the `l_p` measure is used
//! directly. [`PreparedMeasure`] evaluates one measure against a fixed point
//! set, caching IK codes and neighbor lists.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::code::{count_matches, IkCode};
use crate::kernel::model::IkModel;
use crate::vector::FeatureVector;

/// A similarity or distance measure with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    /// Isolation Kernel with a fitted model.
    Ik(IkModel),
    /// `exp(-||x - y||^2 / sigma^2)`.
    Gaussian { sigma: f64 },
    /// Cosine similarity, mapped from `[-1, 1]` to `[0, 1]`.
    Linear,
    /// `(sum |x_i - y_i|^p)^(1/p)`, `p` may be below 1.
    Lp { p: f64 },
    /// Shared nearest neighbors, `|N_k(x) ∩ N_k(y)| / k`.
    Snn { k: usize },
    /// `exp(-||x - y||^2 / (s_x s_y))`, `s_x` the distance from `x` to its
    /// k-th nearest neighbor.
    AdaptiveGaussian { k: usize },
}

impl MeasureSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            MeasureSpec::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                bad(format!("gaussian sigma must be positive, got {sigma}"))
            }
            MeasureSpec::Lp { p } if !(p > 0.0 && p.is_finite()) => {
                bad(format!("lp exponent must be positive, got {p}"))
            }
            MeasureSpec::Snn { k: 0 } | MeasureSpec::AdaptiveGaussian { k: 0 } => {
                bad("neighbor count k must be positive".into())
            }
            _ => Ok(()),
        }
    }

    /// Short label used in CSV output.
    pub fn label(&self) -> String {
        match self {
            MeasureSpec::Ik(m) => format!("IK(psi={})", m.psi()),
            MeasureSpec::Gaussian { sigma } => format!("GK(sigma={sigma})"),
            MeasureSpec::Linear => "LK".into(),
            MeasureSpec::Lp { p } => format!("L{p}"),
            MeasureSpec::Snn { k } => format!("SNN(k={k})"),
            MeasureSpec::AdaptiveGaussian { k } => format!("AG(k={k})"),
        }
    }

    /// True for similarity measures (dissimilarity is `1 - value`).
    pub fn is_similarity(&self) -> bool {
        !matches!(self, MeasureSpec::Lp { .. })
    }

    pub fn needs_context(&self) -> bool {
        matches!(
            self,
            MeasureSpec::Snn { .. } | MeasureSpec::AdaptiveGaussian { .. }
        )
    }

    pub fn neighbor_k(&self) -> Option<usize> {
        match *self {
            MeasureSpec::Snn { k } | MeasureSpec::AdaptiveGaussian { k } => Some(k),
            _ => None,
        }
    }
}

/// k-nearest-neighbor lists over a reference point set, for SNN and AG.
///
/// Lists for the reference points themselves exclude the point's own index.
/// Lists for outside points are computed on demand; there the first
/// reference at distance exactly zero is treated as the point itself and
/// skipped.
#[derive(Clone, Debug)]
pub struct NeighborContext {
    points: Vec<FeatureVector>,
    k: usize,
    lists: Vec<Vec<usize>>,
    kth: Vec<f64>,
}

impl NeighborContext {
    pub fn new(points: Vec<FeatureVector>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("neighbor count k must be positive".into()));
        }
        if points.len() <= k {
            return Err(Error::KOutOfRange {
                k,
                n: points.len(),
            });
        }
        let dim = points[0].dim();
        for p in &points {
            p.check_dim(dim)?;
        }
        let (lists, kth) = (0..points.len())
            .into_par_iter()
            .map(|i| {
                let d: Vec<f64> = points.iter().map(|y| points[i].distance(y)).collect();
                let nn = k_smallest(&d, k, Some(i));
                let kth = d[*nn.last().expect("k >= 1")];
                (sorted(nn), kth)
            })
            .unzip();
        Ok(Self {
            points,
            k,
            lists,
            kth,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[FeatureVector] {
        &self.points
    }

    /// Sorted neighbor indices of reference point `i`.
    pub fn list(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }

    /// Distance from reference point `i` to its k-th neighbor.
    pub fn kth_distance(&self, i: usize) -> f64 {
        self.kth[i]
    }

    /// Sorted neighbor indices and k-th neighbor distance of an arbitrary
    /// point.
    pub fn neighbors_of(&self, x: &FeatureVector) -> Result<(Vec<usize>, f64)> {
        x.check_dim(self.points[0].dim())?;
        let d: Vec<f64> = self.points.iter().map(|y| x.distance(y)).collect();
        let own = d.iter().position(|&v| v == 0.0);
        let nn = k_smallest(&d, self.k, own);
        let kth = d[*nn.last().expect("k >= 1")];
        Ok((sorted(nn), kth))
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Indices of the `k` smallest values (ties to the lower index), skipping
/// `exclude`. Returned in ascending order of value.
pub(crate) fn k_smallest(values: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| Some(i) != exclude).collect();
    let by = |a: &usize, b: &usize| values[*a].total_cmp(&values[*b]).then(a.cmp(b));
    if k < idx.len() {
        idx.select_nth_unstable_by(k, by);
        idx.truncate(k);
    }
    idx.sort_unstable_by(by);
    idx
}

fn shared_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn adaptive_gaussian(sq_dist: f64, sx: f64, sy: f64) -> f64 {
    let scale = sx * sy;
    if scale == 0.0 {
        return if sq_dist == 0.0 { 1.0 } else { 0.0 };
    }
    (-sq_dist / scale).exp()
}

fn cosine01(x: &FeatureVector, y: &FeatureVector) -> f64 {
    let n = x.norm() * y.norm();
    let cos = if n == 0.0 { 0.0 } else { x.dot(y) / n };
    ((1.0 + cos) / 2.0).clamp(0.0, 1.0)
}

/// Raw value of `spec` on `(x, y)`: a similarity in `[0, 1]` for kernel
/// measures, a distance for `l_p`.
pub fn baseline_measure(
    spec: &MeasureSpec,
    x: &FeatureVector,
    y: &FeatureVector,
    ctx: Option<&NeighborContext>,
) -> Result<f64> {
    spec.validate()?;
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(match spec {
        MeasureSpec::Ik(model) => {
            crate::kernel::code::similarity(&model.encode(x)?, &model.encode(y)?)?
        }
        MeasureSpec::Gaussian { sigma } => (-x.squared_distance(y) / (sigma * sigma)).exp(),
        MeasureSpec::Linear => cosine01(x, y),
        MeasureSpec::Lp { p } => x.lp_distance(y, *p),
        MeasureSpec::Snn { k } => {
            let ctx = context_for(spec, ctx, *k)?;
            let (a, _) = ctx.neighbors_of(x)?;
            let (b, _) = ctx.neighbors_of(y)?;
            shared_count(&a, &b) as f64 / *k as f64
        }
        MeasureSpec::AdaptiveGaussian { k } => {
            let ctx = context_for(spec, ctx, *k)?;
            let (_, sx) = ctx.neighbors_of(x)?;
            let (_, sy) = ctx.neighbors_of(y)?;
            adaptive_gaussian(x.squared_distance(y), sx, sy)
        }
    })
}

fn context_for<'c>(
    spec: &MeasureSpec,
    ctx: Option<&'c NeighborContext>,
    k: usize,
) -> Result<&'c NeighborContext> {
    let name = match spec {
        MeasureSpec::Snn { .. } => "SNN",
        _ => "AG",
    };
    let ctx = ctx.ok_or(Error::ContextRequired(name))?;
    if ctx.k() != k {
        return Err(Error::InvalidParameter(format!(
            "{name} k={k} but context was built with k={}",
            ctx.k()
        )));
    }
    Ok(ctx)
}

/// Dissimilarity `m(x, y)`: `1 - baseline` for similarities, the distance
/// itself for `l_p`.
pub fn dissimilarity(
    spec: &MeasureSpec,
    x: &FeatureVector,
    y: &FeatureVector,
    ctx: Option<&NeighborContext>,
) -> Result<f64> {
    let v = baseline_measure(spec, x, y, ctx)?;
    Ok(if spec.is_similarity() { 1.0 - v } else { v })
}

/// A measure bound to a point set, with IK codes and neighbor lists
/// precomputed.
pub struct PreparedMeasure<'a> {
    spec: &'a MeasureSpec,
    points: &'a [FeatureVector],
    codes: Vec<IkCode>,
    ctx: Option<NeighborContext>,
}

impl<'a> PreparedMeasure<'a> {
    pub fn new(spec: &'a MeasureSpec, points: &'a [FeatureVector]) -> Result<Self> {
        spec.validate()?;
        if points.is_empty() {
            return Err(Error::Empty("point set"));
        }
        let dim = points[0].dim();
        for p in points {
            p.check_dim(dim)?;
        }
        let codes = match spec {
            MeasureSpec::Ik(model) => points
                .par_iter()
                .map(|p| model.encode(p))
                .collect::<Result<Vec<_>>>()?,
            _ => Vec::new(),
        };
        let ctx = match spec.neighbor_k() {
            Some(k) => Some(NeighborContext::new(points.to_vec(), k)?),
            None => None,
        };
        Ok(Self {
            spec,
            points,
            codes,
            ctx,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spec(&self) -> &MeasureSpec {
        self.spec
    }

    /// IK codes of the point set (empty for other measures).
    pub fn codes(&self) -> &[IkCode] {
        &self.codes
    }

    /// Dissimilarity between points `i` and `j` of the set.
    pub fn between(&self, i: usize, j: usize) -> f64 {
        let (x, y) = (&self.points[i], &self.points[j]);
        match self.spec {
            MeasureSpec::Ik(_) => {
                let t = self.codes[i].t();
                (t - count_matches(self.codes[i].cells(), self.codes[j].cells())) as f64 / t as f64
            }
            MeasureSpec::Gaussian { sigma } => 1.0 - (-x.squared_distance(y) / (sigma * sigma)).exp(),
            MeasureSpec::Linear => 1.0 - cosine01(x, y),
            MeasureSpec::Lp { p } => x.lp_distance(y, *p),
            MeasureSpec::Snn { k } => {
                let ctx = self.ctx.as_ref().expect("context built in new");
                1.0 - shared_count(ctx.list(i), ctx.list(j)) as f64 / *k as f64
            }
            MeasureSpec::AdaptiveGaussian { .. } => {
                let ctx = self.ctx.as_ref().expect("context built in new");
                1.0 - adaptive_gaussian(x.squared_distance(y), ctx.kth_distance(i), ctx.kth_distance(j))
            }
        }
    }

    /// Dissimilarities from an outside point `q` to every point of the set.
    pub fn from_query(&self, q: &FeatureVector) -> Result<Vec<f64>> {
        q.check_dim(self.points[0].dim())?;
        Ok(match self.spec {
            MeasureSpec::Ik(model) => {
                let qc = model.encode(q)?;
                let t = qc.t() as f64;
                self.codes
                    .iter()
                    .map(|c| (qc.t() - count_matches(qc.cells(), c.cells())) as f64 / t)
                    .collect()
            }
            MeasureSpec::Snn { k } => {
                let ctx = self.ctx.as_ref().expect("context built in new");
                let (nq, _) = ctx.neighbors_of(q)?;
                (0..self.len())
                    .map(|j| 1.0 - shared_count(&nq, ctx.list(j)) as f64 / *k as f64)
                    .collect()
            }
            MeasureSpec::AdaptiveGaussian { .. } => {
                let ctx = self.ctx.as_ref().expect("context built in new");
                let (_, sq) = ctx.neighbors_of(q)?;
                self.points
                    .iter()
                    .enumerate()
                    .map(|(j, y)| 1.0 - adaptive_gaussian(q.squared_distance(y), sq, ctx.kth_distance(j)))
                    .collect()
            }
            spec => self
                .points
                .par_iter()
                .map(|y| dissimilarity(spec, q, y, None))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// Full symmetric dissimilarity matrix with a zero diagonal.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| self.between(i, j)).collect())
            .collect();
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, v) in row.into_iter().enumerate() {
                let j = i + 1 + off;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    }
}
