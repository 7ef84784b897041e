use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::code::IkCode;
use crate::vector::FeatureVector;

/// Squared Euclidean distances from a set of points (rows) to a pool of
/// candidate references (columns).
///
/// When reference sets are drawn from the pool, encoding becomes a lookup:
/// the codes equal those of a model holding the same references, bit for
/// bit. Useful when many models are fitted on one dataset.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DistanceTable {
    pub fn new(rows: &[FeatureVector], cols: &[FeatureVector]) -> Result<Self> {
        let dim = cols.first().ok_or(Error::Empty("reference pool"))?.dim();
        for p in rows.iter().chain(cols) {
            p.check_dim(dim)?;
        }
        let values = rows
            .par_iter()
            .flat_map_iter(|x| cols.iter().map(move |z| z.squared_distance(x)))
            .collect();
        Ok(Self {
            rows: rows.len(),
            cols: cols.len(),
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    /// Code of every row under partitionings whose reference sets are the
    /// given column indices.
    pub fn encode(&self, sets: &[Vec<usize>]) -> Result<Vec<IkCode>> {
        let psi = sets.first().map_or(0, Vec::len);
        if psi == 0 {
            return Err(Error::InvalidParameter("need at least one nonempty reference set".into()));
        }
        for set in sets {
            if set.len() != psi {
                return Err(Error::InvalidParameter("reference sets differ in size".into()));
            }
            if let Some(&bad) = set.iter().find(|&&j| j >= self.cols) {
                return Err(Error::InvalidParameter(format!("reference index {bad} out of range")));
            }
        }
        Ok((0..self.rows)
            .into_par_iter()
            .map(|r| {
                let row = self.row(r);
                let cells = sets
                    .iter()
                    .map(|set| {
                        let mut best = 0;
                        let mut best_dist = f64::INFINITY;
                        for (j, &c) in set.iter().enumerate() {
                            if row[c] < best_dist {
                                best_dist = row[c];
                                best = j;
                            }
                        }
                        best as u32
                    })
                    .collect();
                IkCode::new_unchecked(psi, cells)
            })
            .collect())
    }
}
