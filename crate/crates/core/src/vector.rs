//! Dense and sparse points in `R^d`.
//!
//! Both representations interoperate: every binary operation accepts any
//! mix of dense and sparse operands. Sparse operands are traversed by
//! merging their sorted index lists, so no densification happens on the
//! hot path.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Dense(Vec<f64>),
    Sparse {
        indices: Vec<usize>,
        values: Vec<f64>,
    },
}

/// A point in `R^d`, stored densely or as sorted `(index, value)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    dim: usize,
    repr: Repr,
}

impl FeatureVector {
    /// Builds a dense vector. Rejects empty input and non-finite entries.
    pub fn dense(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidVector("dense vector must have dim > 0".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidVector(format!(
                "non-finite entry at index {pos}"
            )));
        }
        Ok(Self {
            dim: values.len(),
            repr: Repr::Dense(values),
        })
    }

    /// Builds a sparse vector from `(index, value)` pairs.
    ///
    /// Indices must be strictly increasing and below `dim`. Explicit zeros
    /// are kept as given.
    pub fn sparse(dim: usize, pairs: Vec<(usize, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidVector("sparse vector must have dim > 0".into()));
        }
        let mut indices = Vec::with_capacity(pairs.len());
        let mut values = Vec::with_capacity(pairs.len());
        for (pos, (idx, val)) in pairs.into_iter().enumerate() {
            if idx >= dim {
                return Err(Error::InvalidVector(format!(
                    "index {idx} out of range for dim {dim}"
                )));
            }
            if let Some(&prev) = indices.last() {
                if idx <= prev {
                    return Err(Error::InvalidVector(format!(
                        "indices not strictly increasing at position {pos}"
                    )));
                }
            }
            if !val.is_finite() {
                return Err(Error::InvalidVector(format!(
                    "non-finite entry at index {idx}"
                )));
            }
            indices.push(idx);
            values.push(val);
        }
        Ok(Self {
            dim,
            repr: Repr::Sparse { indices, values },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.repr, Repr::Sparse { .. })
    }

    /// Number of stored entries (all `dim` entries for dense vectors).
    pub fn stored_len(&self) -> usize {
        match &self.repr {
            Repr::Dense(v) => v.len(),
            Repr::Sparse { indices, .. } => indices.len(),
        }
    }

    /// Value at coordinate `i`. Panics if `i >= dim`.
    pub fn get(&self, i: usize) -> f64 {
        assert!(i < self.dim, "index {i} out of range for dim {}", self.dim);
        match &self.repr {
            Repr::Dense(v) => v[i],
            Repr::Sparse { indices, values } => match indices.binary_search(&i) {
                Ok(pos) => values[pos],
                Err(_) => 0.0,
            },
        }
    }

    /// Dense slice view, when the vector is stored densely.
    pub fn as_dense(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Dense(v) => Some(v),
            Repr::Sparse { .. } => None,
        }
    }

    pub fn to_dense_vec(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Dense(v) => v.clone(),
            Repr::Sparse { indices, values } => {
                let mut out = vec![0.0; self.dim];
                for (&i, &v) in indices.iter().zip(values) {
                    out[i] = v;
                }
                out
            }
        }
    }

    pub fn to_dense(&self) -> FeatureVector {
        FeatureVector {
            dim: self.dim,
            repr: Repr::Dense(self.to_dense_vec()),
        }
    }

    /// Iterates over stored entries as `(index, value)`; dense vectors
    /// yield every coordinate.
    pub fn iter_stored(&self) -> Box<dyn Iterator<Item = (usize, f64)> + '_> {
        match &self.repr {
            Repr::Dense(v) => Box::new(v.iter().copied().enumerate()),
            Repr::Sparse { indices, values } => {
                Box::new(indices.iter().copied().zip(values.iter().copied()))
            }
        }
    }

    /// Nonzero entries as `(index, value)`.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.iter_stored().filter(|&(_, v)| v != 0.0)
    }

    pub fn norm_squared(&self) -> f64 {
        match &self.repr {
            Repr::Dense(v) => dot_dense(v, v),
            Repr::Sparse { values, .. } => values.iter().map(|v| v * v).sum(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn dot(&self, other: &FeatureVector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        match (&self.repr, &other.repr) {
            (Repr::Dense(a), Repr::Dense(b)) => dot_dense(a, b),
            (Repr::Dense(a), Repr::Sparse { indices, values })
            | (Repr::Sparse { indices, values }, Repr::Dense(a)) => indices
                .iter()
                .zip(values)
                .map(|(&i, &v)| a[i] * v)
                .sum(),
            (
                Repr::Sparse {
                    indices: ia,
                    values: va,
                },
                Repr::Sparse {
                    indices: ib,
                    values: vb,
                },
            ) => {
                let mut acc = 0.0;
                merge_sparse(ia, va, ib, vb, |x, y| acc += x * y);
                acc
            }
        }
    }

    /// Squared Euclidean distance. Dimensions are assumed equal; callers
    /// validate with [`FeatureVector::check_dim`].
    pub fn squared_distance(&self, other: &FeatureVector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        match (&self.repr, &other.repr) {
            (Repr::Dense(a), Repr::Dense(b)) => sq_dist_dense(a, b),
            (Repr::Dense(a), Repr::Sparse { indices, values })
            | (Repr::Sparse { indices, values }, Repr::Dense(a)) => {
                sq_dist_dense_sparse(a, indices, values)
            }
            (
                Repr::Sparse {
                    indices: ia,
                    values: va,
                },
                Repr::Sparse {
                    indices: ib,
                    values: vb,
                },
            ) => {
                let mut acc = 0.0;
                merge_sparse(ia, va, ib, vb, |x, y| {
                    let d = x - y;
                    acc += d * d
                });
                acc
            }
        }
    }

    pub fn distance(&self, other: &FeatureVector) -> f64 {
        self.squared_distance(other).sqrt()
    }

    /// `(sum |x_i - y_i|^p)^(1/p)`; `p` may be fractional (`p < 1` gives the
    /// fractional "distances", which are not metrics).
    pub fn lp_distance(&self, other: &FeatureVector, p: f64) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        let mut add = |x: f64, y: f64| acc += (x - y).abs().powf(p);
        match (&self.repr, &other.repr) {
            (Repr::Dense(a), Repr::Dense(b)) => a.iter().zip(b).for_each(|(&x, &y)| add(x, y)),
            (Repr::Dense(a), Repr::Sparse { indices, values })
            | (Repr::Sparse { indices, values }, Repr::Dense(a)) => {
                let mut k = 0;
                for (j, &x) in a.iter().enumerate() {
                    let y = if k < indices.len() && indices[k] == j {
                        k += 1;
                        values[k - 1]
                    } else {
                        0.0
                    };
                    add(x, y);
                }
            }
            (
                Repr::Sparse {
                    indices: ia,
                    values: va,
                },
                Repr::Sparse {
                    indices: ib,
                    values: vb,
                },
            ) => merge_sparse(ia, va, ib, vb, add),
        }
        acc.powf(1.0 / p)
    }

    /// `x / ||x||`, keeping the representation. The zero vector is returned
    /// unchanged.
    pub fn normalized(&self) -> FeatureVector {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        let repr = match &self.repr {
            Repr::Dense(v) => Repr::Dense(v.iter().map(|x| x / n).collect()),
            Repr::Sparse { indices, values } => Repr::Sparse {
                indices: indices.clone(),
                values: values.iter().map(|x| x / n).collect(),
            },
        };
        FeatureVector {
            dim: self.dim,
            repr,
        }
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim,
            });
        }
        Ok(())
    }
}

/// Visits every index present in either sparse operand, passing the pair
/// of values (zero where absent).
fn merge_sparse(
    ia: &[usize],
    va: &[f64],
    ib: &[usize],
    vb: &[f64],
    mut f: impl FnMut(f64, f64),
) {
    let (mut i, mut j) = (0, 0);
    while i < ia.len() && j < ib.len() {
        match ia[i].cmp(&ib[j]) {
            std::cmp::Ordering::Less => {
                f(va[i], 0.0);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                f(0.0, vb[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                f(va[i], vb[j]);
                i += 1;
                j += 1;
            }
        }
    }
    va[i..].iter().for_each(|&x| f(x, 0.0));
    vb[j..].iter().for_each(|&y| f(0.0, y));
}

fn sq_dist_dense(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            let d = x[l] - y[l];
            acc[l] += d * d;
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        let d = x - y;
        tail += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn dot_dense(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn sq_dist_dense_sparse(a: &[f64], indices: &[usize], values: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut prev = 0;
    for (&i, &v) in indices.iter().zip(values) {
        acc += a[prev..i].iter().map(|x| x * x).sum::<f64>();
        let d = a[i] - v;
        acc += d * d;
        prev = i + 1;
    }
    acc + a[prev..].iter().map(|x| x * x).sum::<f64>()
}
