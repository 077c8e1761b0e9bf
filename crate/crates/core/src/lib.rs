//! Link prediction with a discrete-time quantum walk whose target amplitude is
//! amplified by an oracle phase flip, plus classical neighborhood heuristics,
//! dense spectral verification and a ranking evaluation harness.

pub mod catalog;
pub mod error;
pub mod eval;
pub mod graph;
pub mod heuristics;
pub mod operator;
pub mod output;
pub mod spectral;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Graph, IdMap, LoadOptions, Pair, SplitSet};
pub use heuristics::HeuristicKind;
pub use operator::{build_transition_operator, TransitionOperator, WeightScheme};
pub use walk::{score_pair, score_pairs, AmplitudeVector, ScoringMode, WalkConfig};
