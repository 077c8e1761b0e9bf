use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How negatives scoring exactly the positive's score are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Half of the ties (rounded down) rank above the positive.
    #[default]
    Average,
    Optimistic,
    Pessimistic,
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TiePolicy::Average => "average",
            TiePolicy::Optimistic => "optimistic",
            TiePolicy::Pessimistic => "pessimistic",
        })
    }
}

impl FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(TiePolicy::Average),
            "optimistic" => Ok(TiePolicy::Optimistic),
            "pessimistic" => Ok(TiePolicy::Pessimistic),
            other => Err(Error::InvalidParameter(format!("unknown tie policy {other:?}"))),
        }
    }
}

/// 1-based rank of a positive among its negatives.
pub fn compute_rank(positive: f64, negatives: &[f64], policy: TiePolicy) -> Result<usize> {
    if !positive.is_finite() {
        return Err(Error::NonFinite(format!("positive score {positive}")));
    }
    let mut greater = 0usize;
    let mut equal = 0usize;
    for &s in negatives {
        if !s.is_finite() {
            return Err(Error::NonFinite(format!("negative score {s}")));
        }
        if s > positive {
            greater += 1;
        } else if s == positive {
            equal += 1;
        }
    }
    Ok(1 + greater
        + match policy {
            TiePolicy::Average => equal / 2,
            TiePolicy::Optimistic => 0,
            TiePolicy::Pessimistic => equal,
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mrr: f64,
    /// Keyed by K.
    pub hits: BTreeMap<usize, f64>,
}

pub fn mrr(ranks: &[usize]) -> Result<f64> {
    if ranks.is_empty() {
        return Err(Error::EmptyRanks);
    }
    Ok(ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / ranks.len() as f64)
}

pub fn hits_at(ranks: &[usize], k: usize) -> Result<f64> {
    if ranks.is_empty() {
        return Err(Error::EmptyRanks);
    }
    Ok(ranks.iter().filter(|&&r| r <= k).count() as f64 / ranks.len() as f64)
}

pub fn aggregate(ranks: &[usize], ks: &[usize]) -> Result<Metrics> {
    if ranks.contains(&0) {
        return Err(Error::InvalidParameter("ranks are 1-based".into()));
    }
    let mut hits = BTreeMap::new();
    for &k in ks {
        hits.insert(k, hits_at(ranks, k)?);
    }
    Ok(Metrics { mrr: mrr(ranks)?, hits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_ordering_rank() {
        for p in [TiePolicy::Average, TiePolicy::Optimistic, TiePolicy::Pessimistic] {
            assert_eq!(compute_rank(0.9, &[0.1, 0.5, 0.95], p).unwrap(), 2);
        }
    }

    #[test]
    fn tie_policies() {
        let negs = [0.5, 0.5];
        assert_eq!(compute_rank(0.5, &negs, TiePolicy::Average).unwrap(), 2);
        assert_eq!(compute_rank(0.5, &negs, TiePolicy::Pessimistic).unwrap(), 3);
        assert_eq!(compute_rank(0.5, &negs, TiePolicy::Optimistic).unwrap(), 1);
        assert_eq!(compute_rank(0.5, &[0.5, 0.5, 0.5], TiePolicy::Average).unwrap(), 2);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(compute_rank(f64::NAN, &[0.1], TiePolicy::Average).is_err());
        assert!(compute_rank(0.1, &[f64::INFINITY], TiePolicy::Average).is_err());
    }

    #[test]
    fn aggregate_fixtures() {
        let m = aggregate(&[1, 2, 4], &[1, 3]).unwrap();
        assert!((m.mrr - 7.0 / 12.0).abs() < 1e-12);
        assert!((m.hits[&1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.hits[&3] - 2.0 / 3.0).abs() < 1e-12);
        let h = aggregate(&[1, 3, 11], &[10]).unwrap();
        assert!((h.hits[&10] - 2.0 / 3.0).abs() < 1e-12);
        let top = aggregate(&[1, 1, 1], &[1, 10, 50]).unwrap();
        assert_eq!(top.mrr, 1.0);
        assert!(top.hits.values().all(|&h| h == 1.0));
        assert!(matches!(aggregate(&[], &[10]), Err(Error::EmptyRanks)));
    }
}
