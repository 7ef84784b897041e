//! Experiment harness: concentration and instability sweeps, the
//! `t`-sweep, Monte Carlo checks of the cell-probability and collision
//! results, hubness, density-peaks clustering with AMI, and the
//! data-dependence check.

mod ami;
mod cluster;
mod dependence;
mod hubness;
mod instability;
mod montecarlo;
pub mod stats;
mod tsweep;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

pub use ami::ami;
pub use cluster::{dp_best, dp_cluster, eps_grid, ClusterResult};
pub use dependence::{data_dependence_test, DependenceReport};
pub use hubness::{hubness, hubness_sweep, k_occurrences, HubnessResult, HubnessRow};
pub use instability::{
    cluster_queries, instability_sweep, n_epsilon, n_epsilon_of, query_dissimilarities,
    variance_ratio, variance_ratio_of, InstabilityConfig, InstabilityRow, QueryKind,
};
pub use montecarlo::{
    cell_probability_test, collision_test, collision_test_with, CellProbabilityReport,
    CollisionReport, Distribution,
};
pub use tsweep::{vary_t_sweep, PartitionSource, TSweepRow};

use crate::error::{Error, Result};
use crate::kernel::{IkModel, MeasureSpec};
use crate::vector::FeatureVector;

/// A measure before it is bound to data. IK needs fitting; the others only
/// carry parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureKind {
    Ik { psi: usize },
    Gaussian { sigma: f64 },
    Linear,
    Lp { p: f64 },
    Snn { k: usize },
    AdaptiveGaussian { k: usize },
}

impl MeasureKind {
    /// Fits or wraps the measure for `points`.
    pub fn fit(&self, points: &[FeatureVector], t: usize, seed: u64) -> Result<MeasureSpec> {
        let spec = match *self {
            MeasureKind::Ik { psi } => MeasureSpec::Ik(IkModel::fit(points, psi, t, seed)?),
            MeasureKind::Gaussian { sigma } => MeasureSpec::Gaussian { sigma },
            MeasureKind::Linear => MeasureSpec::Linear,
            MeasureKind::Lp { p } => MeasureSpec::Lp { p },
            MeasureKind::Snn { k } => MeasureSpec::Snn { k },
            MeasureKind::AdaptiveGaussian { k } => MeasureSpec::AdaptiveGaussian { k },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same text as [`MeasureSpec::label`].
    pub fn label(&self) -> String {
        match *self {
            MeasureKind::Ik { psi } => format!("IK(psi={psi})"),
            MeasureKind::Gaussian { sigma } => format!("GK(sigma={sigma})"),
            MeasureKind::Linear => "LK".into(),
            MeasureKind::Lp { p } => format!("L{p}"),
            MeasureKind::Snn { k } => format!("SNN(k={k})"),
            MeasureKind::AdaptiveGaussian { k } => format!("AG(k={k})"),
        }
    }

    /// Stable integer used to key seeds per measure.
    pub(crate) fn key(&self) -> u64 {
        match *self {
            MeasureKind::Ik { psi } => 1 << 32 | psi as u64,
            MeasureKind::Gaussian { sigma } => 2 << 32 ^ sigma.to_bits(),
            MeasureKind::Linear => 3 << 32,
            MeasureKind::Lp { p } => 4 << 32 ^ p.to_bits(),
            MeasureKind::Snn { k } => 5 << 32 | k as u64,
            MeasureKind::AdaptiveGaussian { k } => 6 << 32 | k as u64,
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MeasureKind::Ik { psi } => write!(f, "ik:{psi}"),
            MeasureKind::Gaussian { sigma } => write!(f, "gk:{sigma}"),
            MeasureKind::Linear => write!(f, "lk"),
            MeasureKind::Lp { p } => write!(f, "lp:{p}"),
            MeasureKind::Snn { k } => write!(f, "snn:{k}"),
            MeasureKind::AdaptiveGaussian { k } => write!(f, "ag:{k}"),
        }
    }
}

/// Parses `ik:<psi>`, `gk:<sigma>`, `lk`, `lp:<p>`, `snn:<k>`, `ag:<k>`.
impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidParameter(format!("bad measure `{s}`"));
        let int = || -> Result<usize> { arg.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let real = || -> Result<f64> { arg.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let kind = match name.to_ascii_lowercase().as_str() {
            "ik" => MeasureKind::Ik { psi: int()? },
            "gk" => MeasureKind::Gaussian { sigma: real()? },
            "lk" if arg.is_none() => MeasureKind::Linear,
            "lp" => MeasureKind::Lp { p: real()? },
            "snn" => MeasureKind::Snn { k: int()? },
            "ag" => MeasureKind::AdaptiveGaussian { k: int()? },
            _ => return Err(bad()),
        };
        let ok = match kind {
            MeasureKind::Ik { psi } => psi >= 2,
            MeasureKind::Gaussian { sigma: v } | MeasureKind::Lp { p: v } => v > 0.0 && v.is_finite(),
            MeasureKind::Snn { k } | MeasureKind::AdaptiveGaussian { k } => k > 0,
            MeasureKind::Linear => true,
        };
        if ok {
            Ok(kind)
        } else {
            Err(bad())
        }
    }
}

fn write_comments<W: Write>(out: &mut W, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    Ok(())
}

/// CSV `measure,d,query_kind,variance_ratio,n_epsilon,epsilon,seed`.
pub fn write_instability_csv<W: Write>(rows: &[InstabilityRow], comments: &[String], mut out: W) -> Result<()> {
    write_comments(&mut out, comments)?;
    writeln!(out, "measure,d,query_kind,variance_ratio,n_epsilon,epsilon,seed")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.measure,
            r.d,
            r.query_kind.name(),
            r.variance_ratio,
            r.n_epsilon,
            r.epsilon,
            r.seed
        )?;
    }
    Ok(())
}

/// CSV `t,source,mean_n_eps,stderr,trials`.
pub fn write_tsweep_csv<W: Write>(rows: &[TSweepRow], comments: &[String], mut out: W) -> Result<()> {
    write_comments(&mut out, comments)?;
    writeln!(out, "t,source,mean_n_eps,stderr,trials")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.t, r.source.name(), r.mean_n_eps, r.stderr, r.trials)?;
    }
    Ok(())
}

/// CSV `measure,d,o_k,p`.
pub fn write_hubness_csv<W: Write>(rows: &[HubnessRow], comments: &[String], mut out: W) -> Result<()> {
    write_comments(&mut out, comments)?;
    writeln!(out, "measure,d,o_k,p")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.measure, r.d, r.o_k, r.p)?;
    }
    Ok(())
}

/// CSV `point_id,label`.
pub fn write_clustering_csv<W: Write>(labels: &[usize], comments: &[String], mut out: W) -> Result<()> {
    write_comments(&mut out, comments)?;
    writeln!(out, "point_id,label")?;
    for (i, l) in labels.iter().enumerate() {
        writeln!(out, "{i},{l}")?;
    }
    Ok(())
}

/// CSV `dataset,measure,ami`.
pub fn write_summary_csv<W: Write>(rows: &[(String, String, f64)], comments: &[String], mut out: W) -> Result<()> {
    write_comments(&mut out, comments)?;
    writeln!(out, "dataset,measure,ami")?;
    for (ds, m, a) in rows {
        writeln!(out, "{ds},{m},{a}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_kind_round_trips_through_text() {
        for s in ["ik:16", "gk:5", "lk", "lp:0.5", "snn:10", "ag:200"] {
            let k: MeasureKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        for s in ["ik", "ik:1", "gk:-1", "lk:2", "snn:0", "foo:3", "lp:x"] {
            assert!(s.parse::<MeasureKind>().is_err(), "{s}");
        }
    }

    #[test]
    fn labels_agree_with_specs() {
        let pts: Vec<_> = (0..5).map(|i| FeatureVector::dense(vec![i as f64]).unwrap()).collect();
        for k in [
            MeasureKind::Ik { psi: 2 },
            MeasureKind::Gaussian { sigma: 0.5 },
            MeasureKind::Linear,
            MeasureKind::Lp { p: 0.1 },
            MeasureKind::Snn { k: 2 },
            MeasureKind::AdaptiveGaussian { k: 3 },
        ] {
            assert_eq!(k.fit(&pts, 3, 0).unwrap().label(), k.label());
        }
    }
}
