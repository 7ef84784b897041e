//! Monte Carlo checks on random Voronoi partitionings: how often a point
//! lands in each cell, and how often two points share every cell.

use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;

/// Sampling distributions on `R^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distribution {
    /// Uniform on `[0, 1]^d`.
    Uniform,
    /// Standard normal `N(0, I)`.
    Gaussian,
    /// Equal mixture of `N(0, I)` and `N(5 * 1, I)`.
    TwoCluster,
}

impl Distribution {
    pub const ALL: [Distribution; 3] = [Distribution::Uniform, Distribution::Gaussian, Distribution::TwoCluster];

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Gaussian => "gaussian",
            Distribution::TwoCluster => "two-cluster",
        }
    }

    pub fn sample_into(self, r: &mut ChaCha8Rng, out: &mut [f64]) {
        match self {
            Distribution::Uniform => out.iter_mut().for_each(|x| *x = r.random()),
            Distribution::Gaussian => out.iter_mut().for_each(|x| *x = StandardNormal.sample(r)),
            Distribution::TwoCluster => {
                let shift = if r.random::<bool>() { 5.0 } else { 0.0 };
                out.iter_mut().for_each(|x| {
                    let z: f64 = StandardNormal.sample(r);
                    *x = shift + z;
                });
            }
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown distribution `{s}`")))
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest of the `psi` consecutive `d`-blocks of `refs` (lowest index on
/// ties).
fn nearest(refs: &[f64], d: usize, x: &[f64]) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (j, z) in refs.chunks_exact(d).enumerate() {
        let v = sq_dist(z, x);
        if v < best_dist {
            best_dist = v;
            best = j;
        }
    }
    best
}

fn binomial_band(p: f64, trials: usize) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellProbabilityReport {
    pub psi: usize,
    pub d: usize,
    pub g: Distribution,
    pub f: Distribution,
    pub trials: usize,
    pub frequencies: Vec<f64>,
    /// Three binomial standard deviations around `1/psi`.
    pub band: f64,
}

impl CellProbabilityReport {
    pub fn within_band(&self) -> bool {
        let p = 1.0 / self.psi as f64;
        self.frequencies.iter().all(|f| (f - p).abs() <= self.band)
    }

    pub fn max_deviation(&self) -> f64 {
        let p = 1.0 / self.psi as f64;
        self.frequencies.iter().map(|f| (f - p).abs()).fold(0.0, f64::max)
    }
}

/// Each trial draws `psi` references i.i.d. from `g` and a point from `f`
/// and records the index of the point's cell.
pub fn cell_probability_test(
    psi: usize,
    g: Distribution,
    f: Distribution,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<CellProbabilityReport> {
    if psi == 0 || d == 0 {
        return Err(Error::InvalidParameter("psi and d must be positive".into()));
    }
    if trials < 10_000 {
        return Err(Error::InvalidParameter(format!("need at least 10^4 trials, got {trials}")));
    }
    let base = rng::derive(seed, &[psi as u64, d as u64, g as u64, f as u64]);
    let cells: Vec<usize> = (0..trials)
        .into_par_iter()
        .map_init(
            || (vec![0.0; psi * d], vec![0.0; d]),
            |(refs, x), trial| {
                let mut r = rng::stream(base, trial as u64);
                for z in refs.chunks_exact_mut(d) {
                    g.sample_into(&mut r, z);
                }
                f.sample_into(&mut r, x);
                nearest(refs, d, x)
            },
        )
        .collect();
    let mut counts = vec![0usize; psi];
    for c in cells {
        counts[c] += 1;
    }
    Ok(CellProbabilityReport {
        psi,
        d,
        g,
        f,
        trials,
        frequencies: counts.iter().map(|&c| c as f64 / trials as f64).collect(),
        band: binomial_band(1.0 / psi as f64, trials),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionReport {
    pub psi: usize,
    pub t: usize,
    pub d: usize,
    pub trials: usize,
    pub collisions: usize,
    pub rate: f64,
    /// `1 / psi^t`.
    pub bound: f64,
    /// Three binomial standard deviations at the bound.
    pub band: f64,
}

impl CollisionReport {
    pub fn within_bound(&self) -> bool {
        self.rate <= self.bound + self.band
    }
}

/// `collision_test_with` with both points and references from `dist` and
/// distinct points.
pub fn collision_test(
    psi: usize,
    t: usize,
    d: usize,
    dist: Distribution,
    trials: usize,
    seed: u64,
) -> Result<CollisionReport> {
    collision_test_with(psi, t, d, dist, dist, trials, seed, false)
}

/// Each trial draws two points from `f` (the same point twice when
/// `identical`) and `t` independent reference sets of `psi` points from
/// `g`, and records whether the points share a cell in every
/// partitioning.
#[allow(clippy::too_many_arguments)]
pub fn collision_test_with(
    psi: usize,
    t: usize,
    d: usize,
    f: Distribution,
    g: Distribution,
    trials: usize,
    seed: u64,
    identical: bool,
) -> Result<CollisionReport> {
    if psi < 2 || t == 0 || d == 0 {
        return Err(Error::InvalidParameter("need psi >= 2, t >= 1, d >= 1".into()));
    }
    if trials < 10_000 {
        return Err(Error::InvalidParameter(format!("need at least 10^4 trials, got {trials}")));
    }
    let base = rng::derive(seed, &[psi as u64, t as u64, d as u64, f as u64, g as u64, identical as u64]);
    let collisions = (0..trials)
        .into_par_iter()
        .map_init(
            || (vec![0.0; psi * d], vec![0.0; d], vec![0.0; d]),
            |(refs, a, b), trial| {
                let mut r = rng::stream(base, trial as u64);
                f.sample_into(&mut r, a);
                if identical {
                    b.copy_from_slice(a);
                } else {
                    loop {
                        f.sample_into(&mut r, b);
                        if a != b {
                            break;
                        }
                    }
                }
                for _ in 0..t {
                    for z in refs.chunks_exact_mut(d) {
                        g.sample_into(&mut r, z);
                    }
                    if nearest(refs, d, a) != nearest(refs, d, b) {
                        return 0usize;
                    }
                }
                1
            },
        )
        .sum::<usize>();
    let bound = (psi as f64).powi(-(t as i32));
    Ok(CollisionReport {
        psi,
        t,
        d,
        trials,
        collisions,
        rate: collisions as f64 / trials as f64,
        bound,
        band: binomial_band(bound, trials),
    })
}
