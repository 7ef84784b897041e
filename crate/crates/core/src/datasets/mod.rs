//! Datasets: LIBSVM input/output, synthetic generators, min-max
//! normalization and CSV export.

mod libsvm;
mod synth;

use std::io::Write;

pub use libsvm::{parse_libsvm, parse_libsvm_with_dim, write_libsvm};
pub use synth::{gen_gaussians, gen_w_gaussians, generate, GeneratorSpec};

use crate::error::{Error, Result};
use crate::vector::FeatureVector;

/// A named point set with optional integer class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub points: Vec<FeatureVector>,
    pub labels: Option<Vec<i64>>,
    pub dim: usize,
}

impl Dataset {
    /// Checks that every point has dimension `dim` and that labels, when
    /// present, match the point count.
    pub fn new(
        name: impl Into<String>,
        points: Vec<FeatureVector>,
        labels: Option<Vec<i64>>,
    ) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.dim());
        for p in &points {
            p.check_dim(dim)?;
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(Error::LengthMismatch(l.len(), points.len()));
            }
        }
        Ok(Self {
            name: name.into(),
            points,
            labels,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels_required(&self, what: &'static str) -> Result<&[i64]> {
        self.labels.as_deref().ok_or(Error::LabelsRequired(what))
    }
}

/// Maps every attribute affinely onto `[0, 1]` using its observed range.
/// Constant attributes map to 0.
///
/// Sparse datasets stay sparse when every attribute's minimum is 0 (zero
/// then maps to zero); otherwise all points are densified.
pub fn minmax_normalize(ds: &Dataset) -> Result<Dataset> {
    if ds.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let d = ds.dim;
    let n = ds.len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    let mut stored = vec![0usize; d];
    for p in &ds.points {
        for (j, v) in p.iter_stored() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
            stored[j] += 1;
        }
    }
    for j in 0..d {
        if stored[j] < n {
            lo[j] = lo[j].min(0.0);
            hi[j] = hi[j].max(0.0);
        }
    }
    let scale = |j: usize, v: f64| {
        let range = hi[j] - lo[j];
        if range > 0.0 {
            ((v - lo[j]) / range).clamp(0.0, 1.0)
        } else {
            0.0
        }
    };
    let keep_sparse = (0..d).all(|j| lo[j] == 0.0 || hi[j] == lo[j]);
    let points = ds
        .points
        .iter()
        .map(|p| {
            if p.is_sparse() && keep_sparse {
                FeatureVector::sparse(d, p.iter_stored().map(|(j, v)| (j, scale(j, v))).collect())
            } else {
                FeatureVector::dense((0..d).map(|j| scale(j, p.get(j))).collect())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        name: ds.name.clone(),
        points,
        labels: ds.labels.clone(),
        dim: d,
    })
}

/// Writes `ds` as dense CSV with header `f0,...,f{d-1},label`. The label
/// column is omitted for unlabeled data. Each `comments` entry becomes a
/// leading `# ` line.
pub fn write_csv<W: Write>(ds: &Dataset, comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut header: Vec<String> = (0..ds.dim).map(|j| format!("f{j}")).collect();
    if ds.labels.is_some() {
        header.push("label".into());
    }
    writeln!(out, "{}", header.join(","))?;
    for (i, p) in ds.points.iter().enumerate() {
        let mut row: Vec<String> = (0..ds.dim).map(|j| p.get(j).to_string()).collect();
        if let Some(l) = &ds.labels {
            row.push(l[i].to_string());
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]]) -> Dataset {
        let pts = rows.iter().map(|r| FeatureVector::dense(r.to_vec()).unwrap()).collect();
        Dataset::new("t", pts, None).unwrap()
    }

    #[test]
    fn minmax_examples() {
        let out = minmax_normalize(&ds(&[&[2.0, 5.0], &[4.0, 5.0], &[6.0, 5.0]])).unwrap();
        let col0: Vec<f64> = out.points.iter().map(|p| p.get(0)).collect();
        let col1: Vec<f64> = out.points.iter().map(|p| p.get(1)).collect();
        assert_eq!(col0, vec![0.0, 0.5, 1.0]);
        assert_eq!(col1, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn minmax_idempotent() {
        let a = minmax_normalize(&ds(&[&[0.3, -7.0], &[1.9, 2.5], &[-4.0, 0.1]])).unwrap();
        let b = minmax_normalize(&a).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn minmax_sparse_counts_implicit_zeros() {
        let pts = vec![
            FeatureVector::sparse(2, vec![(0, 4.0)]).unwrap(),
            FeatureVector::sparse(2, vec![(1, 3.0)]).unwrap(),
            FeatureVector::sparse(2, vec![(0, 2.0), (1, 6.0)]).unwrap(),
        ];
        let out = minmax_normalize(&Dataset::new("s", pts, None).unwrap()).unwrap();
        assert!(out.points.iter().all(|p| p.is_sparse()));
        assert_eq!(out.points[0].to_dense_vec(), vec![1.0, 0.0]);
        assert_eq!(out.points[1].to_dense_vec(), vec![0.0, 0.5]);
        assert_eq!(out.points[2].to_dense_vec(), vec![0.5, 1.0]);
    }

    #[test]
    fn minmax_densifies_when_zero_moves() {
        let pts = vec![
            FeatureVector::sparse(1, vec![(0, -1.0)]).unwrap(),
            FeatureVector::sparse(1, vec![]).unwrap(),
        ];
        let out = minmax_normalize(&Dataset::new("s", pts, None).unwrap()).unwrap();
        assert!(!out.points[1].is_sparse());
        assert_eq!(out.points[1].get(0), 1.0);
    }

    #[test]
    fn minmax_rejects_empty() {
        assert!(minmax_normalize(&Dataset::new("e", vec![], None).unwrap()).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut d = ds(&[&[1.0, 0.5], &[-2.0, 3.0]]);
        d.labels = Some(vec![0, 1]);
        let mut buf = Vec::new();
        write_csv(&d, &["seed=3".into()], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# seed=3\nf0,f1,label\n1,0.5,0\n-2,3,1\n"
        );
    }

    #[test]
    fn label_length_checked() {
        let pts = vec![FeatureVector::dense(vec![1.0]).unwrap()];
        assert!(Dataset::new("x", pts, Some(vec![0, 1])).is_err());
    }
}
