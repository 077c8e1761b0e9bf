//! Ranking evaluation: frozen negatives, tie-aware ranks, MRR and Hits@K.

pub mod harness;
pub mod metrics;
pub mod negatives;

pub use harness::{
    evaluate_frozen, positives_for, run_comparison, run_evaluation, write_summary_csv, EvalConfig, EvalReport,
    EvalSplit, HeuristicScorer, PairScorer, QuantumScorer, RankedQuery, ReportMetrics,
};
pub use metrics::{aggregate, compute_rank, hits_at, mrr, Metrics, TiePolicy};
pub use negatives::{
    corruption_negatives, freeze_negatives, hard_negatives, query_seed, sample_uniform_negatives, FrozenNegatives,
    HeuristicMix, NegativePolicy,
};
