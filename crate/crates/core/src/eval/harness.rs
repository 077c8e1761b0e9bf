use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Pair, SplitSet};
use crate::heuristics::HeuristicKind;
use crate::operator::{build_transition_operator, TransitionOperator};
use crate::walk::{score_pairs, WalkConfig};

use super::metrics::{aggregate, compute_rank, TiePolicy};
use super::negatives::{freeze_negatives, FrozenNegatives, NegativePolicy};

/// Anything that maps node pairs to real scores, higher meaning more likely linked.
pub trait PairScorer: Sync {
    fn id(&self) -> String;
    fn score_pairs(&self, pairs: &[Pair]) -> Result<Vec<f64>>;
}

/// Walk-based scorer over a prebuilt operator.
#[derive(Debug, Clone)]
pub struct QuantumScorer {
    op: TransitionOperator,
    cfg: WalkConfig,
}

impl QuantumScorer {
    pub fn new(graph: &Graph, cfg: WalkConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            op: build_transition_operator(graph, cfg.scheme),
            cfg,
        })
    }

    pub fn from_operator(op: TransitionOperator, cfg: WalkConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { op, cfg })
    }

    pub fn config(&self) -> &WalkConfig {
        &self.cfg
    }
}

impl PairScorer for QuantumScorer {
    fn id(&self) -> String {
        format!(
            "quantum(k={},oracle={},scheme={},normalize={})",
            self.cfg.steps,
            if self.cfg.oracle { "on" } else { "off" },
            self.cfg.scheme,
            self.cfg.normalize
        )
    }

    fn score_pairs(&self, pairs: &[Pair]) -> Result<Vec<f64>> {
        score_pairs(&self.op, pairs, &self.cfg)
    }
}

#[derive(Debug, Clone)]
pub struct HeuristicScorer {
    graph: Graph,
    kind: HeuristicKind,
}

impl HeuristicScorer {
    pub fn new(graph: Graph, kind: HeuristicKind) -> Result<Self> {
        kind.validate()?;
        Ok(Self { graph, kind })
    }
}

impl PairScorer for HeuristicScorer {
    fn id(&self) -> String {
        self.kind.to_string()
    }

    fn score_pairs(&self, pairs: &[Pair]) -> Result<Vec<f64>> {
        self.kind.score_pairs(&self.graph, pairs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedQuery {
    pub u: usize,
    pub a: usize,
    pub pos_score: f64,
    pub rank: usize,
    pub n_negs: usize,
    #[serde(skip)]
    pub negative_scores: Vec<f64>,
}

/// Which split supplies the positives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalSplit {
    Valid,
    #[default]
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub hits_ks: Vec<usize>,
    pub tie_policy: TiePolicy,
    pub split: EvalSplit,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            hits_ks: vec![1, 10, 50, 100],
            tie_policy: TiePolicy::Average,
            split: EvalSplit::Test,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetrics {
    pub mrr: f64,
    /// Keyed by K.
    pub hits: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub scorer: String,
    pub policy: NegativePolicy,
    pub seed: u64,
    pub tie_policy: TiePolicy,
    pub split: EvalSplit,
    /// SHA-256 of the frozen negative set, identical across scorers sharing negatives.
    pub negatives_sha256: String,
    /// Queries that received fewer negatives than the policy asked for.
    pub short_queries: usize,
    pub metrics: ReportMetrics,
    pub queries: Vec<RankedQuery>,
}

impl EvalReport {
    pub fn mrr(&self) -> f64 {
        self.metrics.mrr
    }

    pub fn hits(&self, k: usize) -> Option<f64> {
        self.metrics.hits.get(&k).copied()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

fn requested_per_query(policy: &NegativePolicy) -> Option<usize> {
    match *policy {
        NegativePolicy::Uniform { count, .. } | NegativePolicy::Hard { count, .. } => Some(count),
        NegativePolicy::Corruption { count_per_side, .. } => count_per_side.map(|c| 2 * c),
    }
}

/// Ranks every positive against its frozen negatives.
pub fn evaluate_frozen(
    positives: &[Pair],
    negatives: &FrozenNegatives,
    scorer: &dyn PairScorer,
    policy: &NegativePolicy,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    if positives.is_empty() {
        return Err(Error::EmptyRanks);
    }
    if let FrozenNegatives::PerQuery(lists) = negatives {
        if lists.len() != positives.len() {
            return Err(Error::DimensionMismatch {
                expected: positives.len(),
                actual: lists.len(),
            });
        }
    }
    let pos_scores = scorer.score_pairs(positives)?;
    let neg_scores: Vec<Vec<f64>> = match negatives {
        FrozenNegatives::Shared(pairs) => {
            let shared = scorer.score_pairs(pairs)?;
            vec![shared; 1]
        }
        FrozenNegatives::PerQuery(lists) => {
            let flat: Vec<Pair> = lists.iter().flatten().copied().collect();
            let scores = scorer.score_pairs(&flat)?;
            let mut out = Vec::with_capacity(lists.len());
            let mut offset = 0;
            for list in lists {
                out.push(scores[offset..offset + list.len()].to_vec());
                offset += list.len();
            }
            out
        }
    };
    let negs_for = |i: usize| match negatives {
        FrozenNegatives::Shared(_) => &neg_scores[0],
        FrozenNegatives::PerQuery(_) => &neg_scores[i],
    };
    let queries: Vec<RankedQuery> = positives
        .par_iter()
        .enumerate()
        .map(|(i, &(u, a))| {
            let negs = negs_for(i);
            Ok(RankedQuery {
                u,
                a,
                pos_score: pos_scores[i],
                rank: compute_rank(pos_scores[i], negs, cfg.tie_policy)?,
                n_negs: negs.len(),
                negative_scores: negs.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let ranks: Vec<usize> = queries.iter().map(|q| q.rank).collect();
    let metrics = aggregate(&ranks, &cfg.hits_ks)?;
    let short_queries = match requested_per_query(policy) {
        Some(req) => queries.iter().filter(|q| q.n_negs < req).count(),
        None => 0,
    };
    Ok(EvalReport {
        scorer: scorer.id(),
        policy: policy.clone(),
        seed: policy.seed(),
        tie_policy: cfg.tie_policy,
        split: cfg.split,
        negatives_sha256: negatives.digest(),
        short_queries,
        metrics: ReportMetrics {
            mrr: metrics.mrr,
            hits: metrics.hits,
        },
        queries,
    })
}

/// Positives of the configured split.
pub fn positives_for<'a>(splits: &'a SplitSet, cfg: &EvalConfig) -> &'a [Pair] {
    match cfg.split {
        EvalSplit::Valid => &splits.valid,
        EvalSplit::Test => &splits.test,
    }
}

/// Freezes negatives for the configured split once and ranks every scorer
/// against the same set. `scoring_graph` is the graph the scorers see (train,
/// or train plus validation edges in merge mode); hard negatives are mined on
/// it too.
pub fn run_comparison(
    scoring_graph: &Graph,
    splits: &SplitSet,
    scorers: &[&dyn PairScorer],
    policy: &NegativePolicy,
    cfg: &EvalConfig,
) -> Result<(FrozenNegatives, Vec<EvalReport>)> {
    let n = scoring_graph.node_count();
    splits.validate(n)?;
    let full = splits.full_graph(n)?;
    let positives = positives_for(splits, cfg);
    for &(u, a) in positives {
        if scoring_graph.has_edge(u, a) {
            return Err(Error::InvalidParameter(format!(
                "evaluated edge ({u}, {a}) leaks into the scoring graph"
            )));
        }
    }
    let negatives = freeze_negatives(positives, &full, scoring_graph, policy)?;
    let reports = scorers
        .iter()
        .map(|s| evaluate_frozen(positives, &negatives, *s, policy, cfg))
        .collect::<Result<_>>()?;
    Ok((negatives, reports))
}

/// Single-scorer form of [`run_comparison`].
pub fn run_evaluation(
    scoring_graph: &Graph,
    splits: &SplitSet,
    scorer: &dyn PairScorer,
    policy: &NegativePolicy,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let (_, mut reports) = run_comparison(scoring_graph, splits, &[scorer], policy, cfg)?;
    Ok(reports.remove(0))
}

/// One CSV row per report: scorer, policy, seed, MRR and each Hits@K column.
pub fn write_summary_csv<W: Write>(reports: &[EvalReport], mut out: W) -> Result<()> {
    let ks: Vec<usize> = reports
        .first()
        .map(|r| r.metrics.hits.keys().copied().collect())
        .unwrap_or_default();
    write!(out, "scorer,policy,seed,queries,mrr")?;
    for k in &ks {
        write!(out, ",hits@{k}")?;
    }
    writeln!(out)?;
    for r in reports {
        write!(
            out,
            "\"{}\",{},{},{},{:.16e}",
            r.scorer,
            r.policy.name(),
            r.seed,
            r.queries.len(),
            r.metrics.mrr
        )?;
        for k in &ks {
            match r.metrics.hits.get(k) {
                Some(h) => write!(out, ",{h:.16e}")?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant;

    impl PairScorer for Constant {
        fn id(&self) -> String {
            "constant".into()
        }

        fn score_pairs(&self, pairs: &[Pair]) -> Result<Vec<f64>> {
            Ok(vec![1.0; pairs.len()])
        }
    }

    fn fixture() -> (Graph, SplitSet) {
        // Train: path 0-1-2 plus 3-4; test edge (0, 2).
        let splits = SplitSet::new(vec![(0, 1), (1, 2), (3, 4)], vec![], vec![(0, 2)], 5).unwrap();
        (splits.train_graph(5).unwrap(), splits)
    }

    #[test]
    fn constant_scorer_takes_average_tie_rank() {
        let (train, splits) = fixture();
        let policy = NegativePolicy::Corruption {
            count_per_side: None,
            seed: 0,
        };
        let report = run_evaluation(&train, &splits, &Constant, &policy, &EvalConfig::default()).unwrap();
        let q = &report.queries[0];
        assert_eq!(q.n_negs, 4);
        assert_eq!(q.rank, 1 + 4 / 2);
        assert!((report.mrr() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn common_neighbors_end_to_end() {
        // Corruptions of (0, 2): (3,2), (4,2) and (0,3), (0,4); (1,2) and (0,1)
        // are edges. CN(0,2) = 1, every negative scores 0.
        let (train, splits) = fixture();
        let scorer = HeuristicScorer::new(train.clone(), HeuristicKind::CommonNeighbors).unwrap();
        let policy = NegativePolicy::Corruption {
            count_per_side: None,
            seed: 0,
        };
        let report = run_evaluation(&train, &splits, &scorer, &policy, &EvalConfig::default()).unwrap();
        assert_eq!(report.queries[0].pos_score, 1.0);
        assert_eq!(report.queries[0].rank, 1);
        assert_eq!(report.mrr(), 1.0);
        assert_eq!(report.hits(1), Some(1.0));
    }

    #[test]
    fn leakage_is_rejected() {
        let (_, splits) = fixture();
        let leaky = splits.full_graph(5).unwrap();
        let policy = NegativePolicy::Uniform { count: 2, seed: 0 };
        assert!(run_evaluation(&leaky, &splits, &Constant, &policy, &EvalConfig::default()).is_err());
    }

    #[test]
    fn report_json_is_deterministic() {
        let (train, splits) = fixture();
        let scorer = QuantumScorer::new(&train, WalkConfig::default()).unwrap();
        let policy = NegativePolicy::Uniform { count: 3, seed: 8 };
        let a = run_evaluation(&train, &splits, &scorer, &policy, &EvalConfig::default()).unwrap();
        let b = run_evaluation(&train, &splits, &scorer, &policy, &EvalConfig::default()).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let json: serde_json::Value = serde_json::from_str(&a.to_json().unwrap()).unwrap();
        assert!(json["metrics"]["hits"]["10"].is_number());
        assert_eq!(json["queries"][0]["u"], 0);
        assert_eq!(json["policy"]["kind"], "uniform");
    }
}
