use crate::error::{Error, Result};

/// A point's feature map compressed to one cell index per partitioning.
///
/// The full map is `t` one-hot blocks of width `psi`; block `i` has its one
/// at position `cells[i]`. Inner products between maps are match counts, so
/// nothing is lost by storing indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IkCode {
    psi: usize,
    cells: Vec<u32>,
}

impl IkCode {
    pub fn new(psi: usize, cells: Vec<u32>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidParameter("code must have t >= 1 cells".into()));
        }
        if let Some(pos) = cells.iter().position(|&c| c as usize >= psi) {
            return Err(Error::InvalidParameter(format!(
                "cell {} at position {pos} out of range for psi {psi}",
                cells[pos]
            )));
        }
        Ok(Self { psi, cells })
    }

    pub(crate) fn new_unchecked(psi: usize, cells: Vec<u32>) -> Self {
        Self { psi, cells }
    }

    pub fn psi(&self) -> usize {
        self.psi
    }

    pub fn t(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    /// Column indices of the ones in the `t * psi` binary feature map.
    pub fn feature_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, &c)| i * self.psi + c as usize)
    }

    fn check_compatible(&self, other: &IkCode) -> Result<()> {
        if self.psi != other.psi || self.t() != other.t() {
            return Err(Error::IncompatibleCodes {
                psi_a: self.psi,
                t_a: self.t(),
                psi_b: other.psi,
                t_b: other.t(),
            });
        }
        Ok(())
    }

    /// Number of partitionings in which both points share a cell. This is
    /// the inner product of the two feature maps.
    pub fn matches(&self, other: &IkCode) -> Result<usize> {
        self.check_compatible(other)?;
        Ok(count_matches(&self.cells, &other.cells))
    }
}

pub(crate) fn count_matches(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// Isolation Kernel similarity: fraction of partitionings in which `a` and
/// `b` fall into the same cell.
pub fn similarity(a: &IkCode, b: &IkCode) -> Result<f64> {
    Ok(a.matches(b)? as f64 / a.t() as f64)
}

/// `1 - similarity(a, b)`.
pub fn ik_distance(a: &IkCode, b: &IkCode) -> Result<f64> {
    let t = a.t();
    Ok((t - a.matches(b)?) as f64 / t as f64)
}

/// Euclidean distance between the two binary feature maps,
/// `sqrt(2 * (t - matches))`. Each map has norm `sqrt(t)`.
pub fn feature_space_distance(a: &IkCode, b: &IkCode) -> Result<f64> {
    let t = a.t();
    Ok((2.0 * (t - a.matches(b)?) as f64).sqrt())
}
