//! Classical link-prediction baselines over the training graph.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Pair};

pub const DEFAULT_KATZ_BETA: f64 = 0.1;
pub const DEFAULT_KATZ_MAX_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HeuristicKind {
    CommonNeighbors,
    AdamicAdar,
    ResourceAllocation,
    Katz { beta: f64, max_len: usize },
    ShortestPath,
}

impl HeuristicKind {
    pub fn katz_default() -> Self {
        HeuristicKind::Katz {
            beta: DEFAULT_KATZ_BETA,
            max_len: DEFAULT_KATZ_MAX_LEN,
        }
    }

    /// Short identifier used in report names.
    pub fn id(&self) -> &'static str {
        match self {
            HeuristicKind::CommonNeighbors => "cn",
            HeuristicKind::AdamicAdar => "aa",
            HeuristicKind::ResourceAllocation => "ra",
            HeuristicKind::Katz { .. } => "katz",
            HeuristicKind::ShortestPath => "shortest-path",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let HeuristicKind::Katz { beta, max_len } = *self {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::InvalidParameter(format!("katz beta must be > 0, got {beta}")));
            }
            if max_len == 0 {
                return Err(Error::InvalidParameter("katz max_len must be >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn score(&self, graph: &Graph, j: usize, t: usize) -> Result<f64> {
        graph.check_node(j)?;
        graph.check_node(t)?;
        Ok(match *self {
            HeuristicKind::CommonNeighbors => cn_score(graph, j, t),
            HeuristicKind::AdamicAdar => aa_score(graph, j, t),
            HeuristicKind::ResourceAllocation => ra_score(graph, j, t),
            HeuristicKind::Katz { beta, max_len } => katz_score(graph, j, t, beta, max_len)?,
            HeuristicKind::ShortestPath => shortest_path_score(graph, j, t),
        })
    }

    /// Scores pairs in parallel; Katz shares one propagation per source.
    pub fn score_pairs(&self, graph: &Graph, pairs: &[Pair]) -> Result<Vec<f64>> {
        self.validate()?;
        if let HeuristicKind::Katz { beta, max_len } = *self {
            return katz_scores_grouped(graph, pairs, beta, max_len);
        }
        pairs.par_iter().map(|&(j, t)| self.score(graph, j, t)).collect()
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeuristicKind::Katz { beta, max_len } => write!(f, "katz(beta={beta},max_len={max_len})"),
            other => f.write_str(other.id()),
        }
    }
}

impl FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cn" | "common-neighbors" => Ok(HeuristicKind::CommonNeighbors),
            "aa" | "adamic-adar" => Ok(HeuristicKind::AdamicAdar),
            "ra" | "resource-allocation" => Ok(HeuristicKind::ResourceAllocation),
            "katz" => Ok(HeuristicKind::katz_default()),
            "sp" | "shortest-path" => Ok(HeuristicKind::ShortestPath),
            other => Err(Error::InvalidParameter(format!("unknown heuristic {other:?}"))),
        }
    }
}

/// Calls `f(k)` for every common neighbor of `j` and `t` (sorted merge).
fn for_common_neighbors(graph: &Graph, j: usize, t: usize, mut f: impl FnMut(usize)) {
    let (a, b) = (graph.neighbors(j), graph.neighbors(t));
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                f(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
}

pub fn cn_score(graph: &Graph, j: usize, t: usize) -> f64 {
    let mut count = 0usize;
    for_common_neighbors(graph, j, t, |_| count += 1);
    count as f64
}

/// Sum of `1 / ln d_k` over common neighbors with `d_k >= 2`.
pub fn aa_score(graph: &Graph, j: usize, t: usize) -> f64 {
    let mut total = 0.0;
    for_common_neighbors(graph, j, t, |k| {
        let d = graph.degree(k);
        if d >= 2 {
            total += 1.0 / (d as f64).ln();
        }
    });
    total
}

pub fn ra_score(graph: &Graph, j: usize, t: usize) -> f64 {
    let mut total = 0.0;
    for_common_neighbors(graph, j, t, |k| total += 1.0 / graph.degree(k) as f64);
    total
}

/// Truncated Katz index `sum_{l=1}^{max_len} beta^l (A^l)[j][t]`, by repeated
/// sparse products from `e_j`.
pub fn katz_score(graph: &Graph, j: usize, t: usize, beta: f64, max_len: usize) -> Result<f64> {
    let walks = katz_walk_counts(graph, j, max_len)?;
    katz_accumulate(walks.iter().map(|row| row[t]), beta, j, t)
}

fn katz_walk_counts(graph: &Graph, j: usize, max_len: usize) -> Result<Vec<Vec<f64>>> {
    graph.check_node(j)?;
    let n = graph.node_count();
    let mut current = vec![0.0; n];
    current[j] = 1.0;
    let mut rows = Vec::with_capacity(max_len);
    for _ in 0..max_len {
        let next: Vec<f64> = (0..n)
            .map(|u| graph.neighbors(u).iter().map(|&v| current[v]).sum())
            .collect();
        rows.push(next.clone());
        current = next;
    }
    Ok(rows)
}

fn katz_accumulate(counts: impl Iterator<Item = f64>, beta: f64, j: usize, t: usize) -> Result<f64> {
    let mut score = 0.0;
    let mut weight = 1.0;
    for c in counts {
        weight *= beta;
        score += weight * c;
    }
    if score.is_finite() {
        Ok(score)
    } else {
        Err(Error::NonFinite(format!("katz score for ({j}, {t}); beta too large")))
    }
}

fn katz_scores_grouped(graph: &Graph, pairs: &[Pair], beta: f64, max_len: usize) -> Result<Vec<f64>> {
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| pairs[i].0);
    let groups: Vec<&[usize]> = order.chunk_by(|&a, &b| pairs[a].0 == pairs[b].0).collect();
    let scored = groups
        .par_iter()
        .map(|members| {
            let j = pairs[members[0]].0;
            let walks = katz_walk_counts(graph, j, max_len)?;
            members
                .iter()
                .map(|&i| {
                    let t = pairs[i].1;
                    graph.check_node(t)?;
                    Ok((i, katz_accumulate(walks.iter().map(|row| row[t]), beta, j, t)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![0.0; pairs.len()];
    for (i, s) in scored.into_iter().flatten() {
        out[i] = s;
    }
    Ok(out)
}

/// BFS hop distance from `j` to `t`, never traversing the edge `{j, t}` itself.
pub fn distance_excluding_edge(graph: &Graph, j: usize, t: usize) -> Option<usize> {
    if j == t {
        return Some(0);
    }
    let mut dist = vec![usize::MAX; graph.node_count()];
    let mut queue = VecDeque::new();
    dist[j] = 0;
    queue.push_back(j);
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if dist[v] != usize::MAX || (u == j && v == t) || (u == t && v == j) {
                continue;
            }
            dist[v] = dist[u] + 1;
            if v == t {
                return Some(dist[v]);
            }
            queue.push_back(v);
        }
    }
    None
}

/// `1 / dist(j, t)` with the scored edge removed; 0 when disconnected.
pub fn shortest_path_score(graph: &Graph, j: usize, t: usize) -> f64 {
    match distance_excluding_edge(graph, j, t) {
        Some(0) | None => 0.0,
        Some(d) => 1.0 / d as f64,
    }
}

/// Hop distances from `source` to every node (`usize::MAX` when unreachable).
pub fn bfs_distances(graph: &Graph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graph.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn common_neighbors() {
        assert_eq!(cn_score(&complete(3), 0, 1), 1.0);
        assert_eq!(cn_score(&path3(), 0, 2), 1.0);
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(cn_score(&g, 0, 3), 0.0);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn adamic_adar() {
        assert!((aa_score(&path3(), 0, 2) - 1.0 / 2f64.ln()).abs() < 1e-15);
        assert!((aa_score(&path3(), 0, 2) - 1.4427).abs() < 1e-4);
        assert_eq!(aa_score(&path3(), 0, 1), 0.0);
    }

    #[test]
    fn resource_allocation() {
        assert_eq!(ra_score(&path3(), 0, 2), 0.5);
        assert!((ra_score(&complete(4), 0, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(ra_score(&path3(), 0, 1), 0.0);
    }

    #[test]
    fn katz_on_path() {
        // Walks 0->2: one of length 2, two of length 4 (0-1-0-1-2, 0-1-2-1-2).
        let s = katz_score(&path3(), 0, 2, 0.1, 4).unwrap();
        assert!((s - 0.0102).abs() < 1e-15);
        let adjacent = katz_score(&path3(), 0, 1, 0.01, 4).unwrap();
        let far = katz_score(&path3(), 0, 2, 0.01, 4).unwrap();
        assert!(adjacent > far);
        assert!(katz_score(&path3(), 0, 2, 1e-6, 4).unwrap() < 1e-11);
    }

    #[test]
    fn katz_overflow_is_an_error() {
        let g = complete(10);
        assert!(matches!(katz_score(&g, 0, 1, 1e300, 3), Err(Error::NonFinite(_))));
    }

    #[test]
    fn katz_grouped_matches_single() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        let pairs = vec![(0, 2), (3, 5), (0, 4), (1, 1)];
        let kind = HeuristicKind::katz_default();
        let grouped = kind.score_pairs(&g, &pairs).unwrap();
        for (&(j, t), s) in pairs.iter().zip(grouped) {
            assert_eq!(
                s,
                katz_score(&g, j, t, DEFAULT_KATZ_BETA, DEFAULT_KATZ_MAX_LEN).unwrap()
            );
        }
    }

    #[test]
    fn shortest_path_rules() {
        assert_eq!(shortest_path_score(&path3(), 0, 2), 0.5);
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(shortest_path_score(&g, 0, 3), 0.0);
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(shortest_path_score(&edge, 0, 1), 0.0);
        // Triangle: removing the scored edge leaves a two-hop detour.
        assert_eq!(shortest_path_score(&complete(3), 0, 1), 0.5);
    }

    #[test]
    fn parsing_round_trip() {
        for s in ["cn", "aa", "ra", "katz", "shortest-path"] {
            assert_eq!(s.parse::<HeuristicKind>().unwrap().id(), s);
        }
        assert!("pagerank".parse::<HeuristicKind>().is_err());
    }
}
