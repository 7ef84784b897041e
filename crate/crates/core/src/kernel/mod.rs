//! Isolation Kernel: fitting, encoding, similarity and the baseline
//! measures.

mod code;
pub mod io;
mod measure;
mod model;
mod table;

use rayon::prelude::*;

pub use code::{feature_space_distance, ik_distance, similarity, IkCode};
pub use measure::{
    baseline_measure, dissimilarity, MeasureSpec, NeighborContext, PreparedMeasure,
};
pub use model::IkModel;
pub use table::DistanceTable;

pub(crate) use measure::k_smallest;

pub(crate) use code::count_matches;

use crate::error::Result;
use crate::vector::FeatureVector;

/// IK Gram matrix of `points`: `G[i][j] = similarity(encode(p_i), encode(p_j))`.
pub fn gram(model: &IkModel, points: &[FeatureVector]) -> Result<Vec<Vec<f64>>> {
    let codes = model.encode_all(points)?;
    Ok(gram_from_codes(&codes))
}

/// Gram matrix of already-encoded points. Rows are computed independently.
pub fn gram_from_codes(codes: &[IkCode]) -> Vec<Vec<f64>> {
    codes
        .par_iter()
        .map(|a| {
            let t = a.t() as f64;
            codes
                .iter()
                .map(|b| count_matches(a.cells(), b.cells()) as f64 / t)
                .collect()
        })
        .collect()
}

/// Sparse row of the explicit feature map, scaled by `1/sqrt(t)` so the
/// row has unit norm and inner products equal IK similarity. Column
/// indices are 0-based in `[0, t * psi)`.
pub fn feature_row(code: &IkCode) -> Vec<(usize, f64)> {
    let scale = 1.0 / (code.t() as f64).sqrt();
    code.feature_indices().map(|j| (j, scale)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(n: usize) -> Vec<FeatureVector> {
        (0..n)
            .map(|i| {
                let x = i as f64;
                FeatureVector::dense(vec![(x * 1.3).sin(), (x * 0.7).cos(), x / 10.0]).unwrap()
            })
            .collect()
    }

    #[test]
    fn gram_of_one_point() {
        let data = pts(4);
        let m = IkModel::fit(&data, 2, 10, 0).unwrap();
        assert_eq!(gram(&m, &data[..1]).unwrap(), vec![vec![1.0]]);
    }

    #[test]
    fn gram_symmetric_with_unit_diagonal() {
        let data = pts(10);
        let m = IkModel::fit(&data, 3, 50, 11).unwrap();
        let g = gram(&m, &data).unwrap();
        for i in 0..10 {
            assert_eq!(g[i][i], 1.0);
            for j in 0..10 {
                assert_eq!(g[i][j], g[j][i]);
                assert!((0.0..=1.0).contains(&g[i][j]));
            }
        }
    }

    #[test]
    fn same_cell_everywhere_gives_one() {
        let z0 = FeatureVector::dense(vec![0.0, 0.0]).unwrap();
        let z1 = FeatureVector::dense(vec![10.0, 10.0]).unwrap();
        let m = IkModel::from_references(vec![vec![z0.clone(), z1.clone()]; 5], 0).unwrap();
        let a = FeatureVector::dense(vec![0.5, 0.1]).unwrap();
        let b = FeatureVector::dense(vec![-1.0, 0.3]).unwrap();
        assert_eq!(gram(&m, &[a, b]).unwrap()[0][1], 1.0);
    }

    #[test]
    fn feature_rows_reproduce_similarity() {
        let data = pts(6);
        let m = IkModel::fit(&data, 3, 40, 5).unwrap();
        let codes = m.encode_all(&data).unwrap();
        for a in &codes {
            let ra = feature_row(a);
            assert_eq!(ra.len(), 40);
            let self_ip: f64 = ra.iter().map(|(_, v)| v * v).sum();
            assert!((self_ip - 1.0).abs() < 1e-12);
            for b in &codes {
                let rb = feature_row(b);
                let ip: f64 = ra
                    .iter()
                    .filter(|(j, _)| rb.iter().any(|(k, _)| k == j))
                    .map(|(_, v)| v * v)
                    .sum();
                assert!((ip - similarity(a, b).unwrap()).abs() < 1e-12);
            }
        }
    }
}
