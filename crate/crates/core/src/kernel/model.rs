use rand::seq::index;

use crate::error::{Error, Result};
use crate::kernel::code::IkCode;
use crate::rng;
use crate::vector::FeatureVector;

/// An Isolation Kernel built from `t` random Voronoi partitionings.
///
/// Partitioning `i` is induced by reference set `i`: `psi` points sampled
/// without replacement from the fitting data. A point's cell in that
/// partitioning is the index of its Euclidean-nearest reference. The
/// references are owned by the model, so the fitting data may be dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct IkModel {
    psi: usize,
    dim: usize,
    seed: u64,
    references: Vec<Vec<FeatureVector>>,
}

impl IkModel {
    /// Samples `t` reference sets of `psi` points each from `data`.
    ///
    /// Reference set `i` is drawn from sub-stream `i` of `seed`, so the
    /// first `t'` sets of a model fitted with `t > t'` equal those of a
    /// model fitted with `t'`.
    pub fn fit(data: &[FeatureVector], psi: usize, t: usize, seed: u64) -> Result<Self> {
        let sets = Self::sample_indices(data.len(), psi, t, seed)?;
        let dim = data[0].dim();
        for p in data {
            p.check_dim(dim)?;
        }
        let references = sets
            .iter()
            .map(|set| set.iter().map(|&j| data[j].clone()).collect())
            .collect();
        Ok(Self {
            psi,
            dim,
            seed,
            references,
        })
    }

    /// Data indices that [`fit`](Self::fit) would pick for each reference
    /// set when fitting on `n` points.
    pub fn sample_indices(n: usize, psi: usize, t: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
        if psi < 2 {
            return Err(Error::InvalidParameter(format!("psi must be >= 2, got {psi}")));
        }
        if t == 0 {
            return Err(Error::InvalidParameter("t must be >= 1".into()));
        }
        if n < psi {
            return Err(Error::InsufficientData { needed: psi, got: n });
        }
        Ok((0..t)
            .map(|i| {
                let mut rng = rng::stream(seed, i as u64);
                index::sample(&mut rng, n, psi).into_vec()
            })
            .collect())
    }

    /// Builds a model from explicit reference sets.
    pub fn from_references(references: Vec<Vec<FeatureVector>>, seed: u64) -> Result<Self> {
        let first = references
            .first()
            .ok_or(Error::InvalidParameter("t must be >= 1".into()))?;
        let psi = first.len();
        if psi < 2 {
            return Err(Error::InvalidParameter(format!("psi must be >= 2, got {psi}")));
        }
        let dim = first[0].dim();
        for set in &references {
            if set.len() != psi {
                return Err(Error::InvalidParameter(format!(
                    "reference sets must all have {psi} points, found {}",
                    set.len()
                )));
            }
            for z in set {
                z.check_dim(dim)?;
            }
        }
        Ok(Self {
            psi,
            dim,
            seed,
            references,
        })
    }

    pub fn psi(&self) -> usize {
        self.psi
    }

    pub fn t(&self) -> usize {
        self.references.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn references(&self) -> &[Vec<FeatureVector>] {
        &self.references
    }

    /// A model using only the first `t` partitionings.
    pub fn truncated(&self, t: usize) -> Result<Self> {
        if t == 0 || t > self.t() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate a t={} model to t={t}",
                self.t()
            )));
        }
        Ok(Self {
            references: self.references[..t].to_vec(),
            ..self.clone()
        })
    }

    /// Maps `x` to its cell index in every partitioning.
    pub fn encode(&self, x: &FeatureVector) -> Result<IkCode> {
        x.check_dim(self.dim)?;
        let cells = self
            .references
            .iter()
            .map(|set| nearest_reference(set, x) as u32)
            .collect();
        Ok(IkCode::new_unchecked(self.psi, cells))
    }

    pub fn encode_all(&self, points: &[FeatureVector]) -> Result<Vec<IkCode>> {
        points.iter().map(|p| self.encode(p)).collect()
    }
}

/// Index of the nearest reference; the lowest index wins ties.
pub(crate) fn nearest_reference(set: &[FeatureVector], x: &FeatureVector) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (j, z) in set.iter().enumerate() {
        let d = z.squared_distance(x);
        if d < best_dist {
            best_dist = d;
            best = j;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> FeatureVector {
        FeatureVector::dense(v.to_vec()).unwrap()
    }

    fn grid(n: usize) -> Vec<FeatureVector> {
        (0..n).map(|i| pt(&[i as f64, (i * i) as f64 * 0.1])).collect()
    }

    #[test]
    fn exhausting_the_data_gives_a_permutation() {
        let data = grid(4);
        let m = IkModel::fit(&data, 4, 1, 3).unwrap();
        let mut got: Vec<_> = m.references()[0].iter().map(|p| p.get(0) as usize).collect();
        got.sort();
        assert_eq!(got, vec![0, 1, 2, 3]);
    }

    #[test]
    fn insufficient_data() {
        let err = IkModel::fit(&grid(3), 5, 10, 0).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { needed: 5, got: 3 }));
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let mut data = grid(5);
        data.push(pt(&[1.0, 2.0, 3.0]));
        assert!(matches!(
            IkModel::fit(&data, 2, 3, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fit_is_deterministic() {
        let data = grid(64);
        let a = IkModel::fit(&data, 32, 200, 7).unwrap();
        let b = IkModel::fit(&data, 32, 200, 7).unwrap();
        assert_eq!(a, b);
        let c = IkModel::fit(&data, 32, 200, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn reference_members_are_distinct() {
        let data = grid(40);
        let m = IkModel::fit(&data, 16, 50, 1).unwrap();
        for set in m.references() {
            let mut xs: Vec<_> = set.iter().map(|p| p.get(0) as usize).collect();
            xs.sort();
            xs.dedup();
            assert_eq!(xs.len(), 16);
        }
    }

    #[test]
    fn prefix_of_larger_model() {
        let data = grid(30);
        let big = IkModel::fit(&data, 8, 20, 5).unwrap();
        let small = IkModel::fit(&data, 8, 5, 5).unwrap();
        assert_eq!(big.truncated(5).unwrap(), small);
    }

    #[test]
    fn nearest_reference_rule() {
        let m = IkModel::from_references(vec![vec![pt(&[0.0, 0.0]), pt(&[10.0, 10.0])]], 0).unwrap();
        assert_eq!(m.encode(&pt(&[1.0, 1.0])).unwrap().cells(), &[0]);
        assert_eq!(m.encode(&pt(&[10.0, 10.0])).unwrap().cells(), &[1]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let refs = vec![
            pt(&[9.0, 9.0]),
            pt(&[8.0, 8.0]),
            pt(&[1.0, 0.0]),
            pt(&[7.0, 7.0]),
            pt(&[6.0, 6.0]),
            pt(&[-1.0, 0.0]),
        ];
        let m = IkModel::from_references(vec![refs], 0).unwrap();
        assert_eq!(m.encode(&pt(&[0.0, 0.0])).unwrap().cells(), &[2]);
    }

    #[test]
    fn encode_checks_dimension() {
        let m = IkModel::fit(&grid(5), 2, 2, 0).unwrap();
        assert!(matches!(
            m.encode(&pt(&[1.0])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn references_encode_to_themselves() {
        let data = grid(20);
        let m = IkModel::fit(&data, 5, 10, 2).unwrap();
        for (i, set) in m.references().iter().enumerate() {
            for (j, z) in set.iter().enumerate() {
                assert_eq!(m.encode(z).unwrap().cells()[i] as usize, j);
            }
        }
    }
}
