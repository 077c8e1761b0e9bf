//! Negative sampling policies. Every sampled pair is a non-edge of the full
//! graph (train, valid and test edges together), never a self-pair and never
//! the positive it is drawn for.

use std::collections::HashSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{unordered, Graph, Pair};
use crate::heuristics::bfs_distances;

/// Weights of the min-max normalized heuristics ranking hard-negative candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicMix {
    pub cn_weight: f64,
    pub shortest_path_weight: f64,
}

impl Default for HeuristicMix {
    fn default() -> Self {
        Self {
            cn_weight: 0.5,
            shortest_path_weight: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NegativePolicy {
    /// One shared list of random non-edges ranked against every positive.
    Uniform { count: usize, seed: u64 },
    /// Per-positive corruptions of either endpoint; `None` takes the whole set.
    Corruption { count_per_side: Option<usize>, seed: u64 },
    /// Per-positive corruptions ranked by a heuristic mix; the top `count` are kept.
    Hard { count: usize, seed: u64, mix: HeuristicMix },
}

impl NegativePolicy {
    pub fn seed(&self) -> u64 {
        match self {
            NegativePolicy::Uniform { seed, .. }
            | NegativePolicy::Corruption { seed, .. }
            | NegativePolicy::Hard { seed, .. } => *seed,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NegativePolicy::Uniform { .. } => "uniform",
            NegativePolicy::Corruption { .. } => "corruption",
            NegativePolicy::Hard { .. } => "hard",
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for the `index`-th query of a run seeded with `seed`.
pub fn query_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(index as u64))
}

/// `count` distinct unordered non-edges drawn by rejection sampling, in `(min, max)` form.
pub fn sample_uniform_negatives(full: &Graph, count: usize, seed: u64) -> Result<Vec<Pair>> {
    let n = full.node_count();
    let available = full.non_edge_count();
    if available < count {
        return Err(Error::InsufficientNegatives {
            requested: count,
            found: available,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    let budget = 1000 + 100 * count;
    let mut attempts = 0;
    while out.len() < count {
        if attempts == budget {
            return Err(Error::InsufficientNegatives {
                requested: count,
                found: out.len(),
            });
        }
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b || full.has_edge(a, b) {
            continue;
        }
        let pair = unordered(a, b);
        if seen.insert(pair) {
            out.push(pair);
        }
    }
    Ok(out)
}

/// Fixed-endpoint view of one corruption side: pairs `(x, kept)` or `(kept, y)`.
#[derive(Clone, Copy)]
struct Side {
    kept: usize,
    /// The other endpoint of the positive; replacing with it reproduces the positive.
    other: usize,
    kept_first: bool,
}

impl Side {
    fn pair(&self, free: usize) -> Pair {
        if self.kept_first {
            (self.kept, free)
        } else {
            (free, self.kept)
        }
    }

    fn admits(&self, full: &Graph, free: usize) -> bool {
        free != self.kept && free != self.other && !full.has_edge(self.kept, free)
    }

    fn candidates(&self, full: &Graph) -> Vec<usize> {
        (0..full.node_count()).filter(|&x| self.admits(full, x)).collect()
    }
}

fn sides(positive: Pair) -> [Side; 2] {
    let (u, a) = positive;
    [
        // (x, a): corrupt the first node.
        Side {
            kept: a,
            other: u,
            kept_first: false,
        },
        // (u, y): corrupt the second node.
        Side {
            kept: u,
            other: a,
            kept_first: true,
        },
    ]
}

fn sample_side(full: &Graph, side: Side, count: Option<usize>, rng: &mut ChaCha8Rng) -> Vec<Pair> {
    let n = full.node_count();
    match count {
        None => side.candidates(full).into_iter().map(|x| side.pair(x)).collect(),
        Some(0) => Vec::new(),
        Some(c) => {
            // Rejection first: cheap when c is small relative to n.
            if c.saturating_mul(4) < n {
                let mut chosen = Vec::with_capacity(c);
                let mut seen = HashSet::with_capacity(c);
                for _ in 0..50 * c {
                    let x = rng.gen_range(0..n);
                    if side.admits(full, x) && seen.insert(x) {
                        chosen.push(x);
                        if chosen.len() == c {
                            return chosen.into_iter().map(|x| side.pair(x)).collect();
                        }
                    }
                }
            }
            let candidates = side.candidates(full);
            let take = c.min(candidates.len());
            rand::seq::index::sample(rng, candidates.len(), take)
                .into_iter()
                .map(|i| side.pair(candidates[i]))
                .collect()
        }
    }
}

/// Up to `count_per_side` corruptions of each endpoint of `positive`
/// (`None` returns the whole filtered corruption set). Short sides are not an error.
pub fn corruption_negatives(
    positive: Pair,
    full: &Graph,
    count_per_side: Option<usize>,
    seed: u64,
) -> Result<Vec<Pair>> {
    full.check_node(positive.0)?;
    full.check_node(positive.1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for side in sides(positive) {
        out.extend(sample_side(full, side, count_per_side, &mut rng));
    }
    Ok(out)
}

fn min_max_normalize(values: &mut [f64]) {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let span = hi - lo;
    for v in values.iter_mut() {
        *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
    }
}

/// The `count` corruptions of `positive` that look most like real links by
/// a mix of common-neighbor count and inverse BFS distance, both measured on
/// `heuristic_graph` and min-max normalized over the candidate set. Score ties
/// are broken by seeded random keys.
pub fn hard_negatives(
    positive: Pair,
    full: &Graph,
    heuristic_graph: &Graph,
    count: usize,
    mix: HeuristicMix,
    seed: u64,
) -> Result<Vec<Pair>> {
    full.check_node(positive.0)?;
    full.check_node(positive.1)?;
    if heuristic_graph.node_count() != full.node_count() {
        return Err(Error::DimensionMismatch {
            expected: full.node_count(),
            actual: heuristic_graph.node_count(),
        });
    }
    let total_weight = mix.cn_weight + mix.shortest_path_weight;
    if mix.cn_weight < 0.0 || mix.shortest_path_weight < 0.0 || total_weight <= 0.0 {
        return Err(Error::InvalidParameter(format!("bad heuristic mix {mix:?}")));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let n = full.node_count();
    let mut pairs = Vec::new();
    let mut cn = Vec::new();
    let mut sp = Vec::new();
    for side in sides(positive) {
        let mut common = vec![0u32; n];
        for &k in heuristic_graph.neighbors(side.kept) {
            for &x in heuristic_graph.neighbors(k) {
                common[x] += 1;
            }
        }
        let dist = bfs_distances(heuristic_graph, side.kept);
        for x in side.candidates(full) {
            pairs.push(side.pair(x));
            cn.push(common[x] as f64);
            sp.push(if dist[x] == usize::MAX || dist[x] == 0 {
                0.0
            } else {
                1.0 / dist[x] as f64
            });
        }
    }
    min_max_normalize(&mut cn);
    min_max_normalize(&mut sp);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranked: Vec<(f64, u64, Pair)> = pairs
        .into_iter()
        .zip(cn.iter().zip(&sp))
        .map(|(pair, (c, s))| {
            let score = (mix.cn_weight * c + mix.shortest_path_weight * s) / total_weight;
            (score, rng.gen::<u64>(), pair)
        })
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    ranked.truncate(count);
    Ok(ranked.into_iter().map(|(_, _, p)| p).collect())
}

/// Negatives fixed before any scorer runs, reused by every scorer in a comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrozenNegatives {
    Shared(Vec<Pair>),
    PerQuery(Vec<Vec<Pair>>),
}

impl FrozenNegatives {
    pub fn for_query(&self, index: usize) -> &[Pair] {
        match self {
            FrozenNegatives::Shared(pairs) => pairs,
            FrozenNegatives::PerQuery(lists) => &lists[index],
        }
    }

    /// Writes `query,source,target` rows; shared negatives use query `*`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "query,source,target")?;
        match self {
            FrozenNegatives::Shared(pairs) => {
                for (u, v) in pairs {
                    writeln!(out, "*,{u},{v}")?;
                }
            }
            FrozenNegatives::PerQuery(lists) => {
                for (q, pairs) in lists.iter().enumerate() {
                    for (u, v) in pairs {
                        writeln!(out, "{q},{u},{v}")?;
                    }
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the CSV rendering, hex encoded.
    pub fn digest(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        let hash = Sha256::digest(&buf);
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Samples negatives for every positive according to `policy`.
pub fn freeze_negatives(
    positives: &[Pair],
    full: &Graph,
    heuristic_graph: &Graph,
    policy: &NegativePolicy,
) -> Result<FrozenNegatives> {
    for &(u, a) in positives {
        if !full.has_edge(u, a) {
            return Err(Error::InvalidParameter(format!(
                "positive ({u}, {a}) is not an edge of the full graph"
            )));
        }
    }
    Ok(match *policy {
        NegativePolicy::Uniform { count, seed } => {
            FrozenNegatives::Shared(sample_uniform_negatives(full, count, seed)?)
        }
        NegativePolicy::Corruption { count_per_side, seed } => FrozenNegatives::PerQuery(
            positives
                .iter()
                .enumerate()
                .map(|(i, &p)| corruption_negatives(p, full, count_per_side, query_seed(seed, i)))
                .collect::<Result<_>>()?,
        ),
        NegativePolicy::Hard { count, seed, mix } => FrozenNegatives::PerQuery(
            positives
                .iter()
                .enumerate()
                .map(|(i, &p)| hard_negatives(p, full, heuristic_graph, count, mix, query_seed(seed, i)))
                .collect::<Result<_>>()?,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn uniform_on_complete_graph_fails() {
        assert!(matches!(
            sample_uniform_negatives(&catalog::complete(3), 1, 0),
            Err(Error::InsufficientNegatives { .. })
        ));
    }

    #[test]
    fn uniform_forced_choice_and_determinism() {
        let path = catalog::path(3);
        assert_eq!(sample_uniform_negatives(&path, 1, 9).unwrap(), vec![(0, 2)]);
        let g = catalog::cycle(30);
        let a = sample_uniform_negatives(&g, 40, 5).unwrap();
        assert_eq!(a, sample_uniform_negatives(&g, 40, 5).unwrap());
        assert_ne!(a, sample_uniform_negatives(&g, 40, 6).unwrap());
        let distinct: HashSet<_> = a.iter().collect();
        assert_eq!(distinct.len(), 40);
    }

    #[test]
    fn corruption_on_star_exhausts_leaf_side() {
        // Star with center 0 and leaves 1..=3; positive (0, 1).
        let star = catalog::star(4);
        let negs = corruption_negatives((0, 1), &star, Some(10), 1).unwrap();
        let expected: HashSet<Pair> = [(2, 1), (3, 1)].into_iter().collect();
        assert_eq!(negs.iter().copied().collect::<HashSet<_>>(), expected);
        assert!(corruption_negatives((0, 1), &star, Some(0), 1).unwrap().is_empty());
        let all = corruption_negatives((0, 1), &star, None, 1).unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn corruption_filters_edges_and_positive() {
        let g = catalog::erdos_renyi(40, 0.15, 2);
        let pos = g.edges().next().unwrap();
        for count in [Some(3), Some(15), None] {
            let negs = corruption_negatives(pos, &g, count, 11).unwrap();
            for &(x, y) in &negs {
                assert_ne!(x, y);
                assert!(!g.has_edge(x, y));
                assert_ne!(unordered(x, y), unordered(pos.0, pos.1));
                assert!(x == pos.0 || y == pos.1);
            }
            if let Some(c) = count {
                assert!(negs.len() <= 2 * c);
            }
        }
    }

    #[test]
    fn hard_negatives_prefer_shared_neighbors() {
        // Positive (0, 1). Node 2 shares three neighbors with 1; node 9 is isolated.
        let edges = [
            (0, 1),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
            (0, 6),
            (6, 7),
            (7, 8),
        ];
        let g = Graph::from_edges(10, edges).unwrap();
        let negs = hard_negatives((0, 1), &g, &g, 50, HeuristicMix::default(), 3).unwrap();
        let pos_of = |p: Pair| negs.iter().position(|&q| q == p).unwrap();
        assert!(pos_of((2, 1)) < pos_of((9, 1)));
        // Disconnected with no common neighbors ranks behind everything else.
        let last_block: Vec<_> = negs[negs.len() - 2..].to_vec();
        assert!(last_block.contains(&(9, 1)) && last_block.contains(&(0, 9)));
        assert_eq!(
            negs,
            hard_negatives((0, 1), &g, &g, 50, HeuristicMix::default(), 3).unwrap()
        );
        let top = hard_negatives((0, 1), &g, &g, 1, HeuristicMix::default(), 3).unwrap();
        assert_eq!(top, vec![(2, 1)]);
    }

    #[test]
    fn frozen_digest_is_stable() {
        let g = catalog::cycle(12);
        let positives: Vec<Pair> = vec![(0, 1), (5, 6)];
        let policy = NegativePolicy::Corruption {
            count_per_side: Some(3),
            seed: 4,
        };
        let a = freeze_negatives(&positives, &g, &g, &policy).unwrap();
        let b = freeze_negatives(&positives, &g, &g, &policy).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.for_query(1).len(), 6);
        assert!(freeze_negatives(&[(0, 5)], &g, &g, &policy).is_err());
    }
}
