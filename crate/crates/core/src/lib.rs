//! Isolation Kernel built from random Voronoi partitionings.
//!
//! A model holds `t` reference sets of `psi` points sampled from the data.
//! Each set induces a Voronoi partitioning; a point is encoded as the cell
//! it falls into in every partitioning, and two points are similar in
//! proportion to how often they share a cell.
//!
//! Besides the kernel the crate has dataset loaders and generators, an
//! exact ball-tree k-NN index that works over any metric, and an
//! experiment harness for concentration, hubness and clustering studies.

pub mod cli;
pub mod datasets;
pub mod error;
pub mod experiments;
pub mod index;
pub mod kernel;
pub mod rng;
pub mod vector;

pub use error::{Error, Result};
pub use kernel::{IkCode, IkModel, MeasureSpec};
pub use vector::FeatureVector;
