//! Named small graphs and seeded random generators used by verification.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Pair};

fn build(n: usize, edges: impl IntoIterator<Item = Pair>) -> Graph {
    Graph::from_edges(n, edges).expect("catalog edges are in range")
}

pub fn path(n: usize) -> Graph {
    build(n, (1..n).map(|i| (i - 1, i)))
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least three nodes");
    build(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Node 0 joined to `n - 1` leaves.
pub fn star(n: usize) -> Graph {
    build(n, (1..n).map(|i| (0, i)))
}

pub fn complete(n: usize) -> Graph {
    build(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// Two cliques of size `clique` joined by one bridge edge.
pub fn barbell(clique: usize) -> Graph {
    let n = 2 * clique;
    let left = (0..clique).flat_map(|u| (u + 1..clique).map(move |v| (u, v)));
    let right = (clique..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)));
    build(n, left.chain(right).chain([(clique - 1, clique)]))
}

/// Circulant graph: `i ~ i +- s (mod n)` for each offset `s`. Regular.
pub fn circulant(n: usize, offsets: &[usize]) -> Graph {
    build(n, offsets.iter().flat_map(|&s| (0..n).map(move |i| (i, (i + s) % n))))
}

pub fn hypercube(dim: u32) -> Graph {
    let n = 1usize << dim;
    build(n, (0..n).flat_map(|u| (0..dim).map(move |b| (u, u ^ (1 << b)))))
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    build(10, outer.chain(spokes).chain(inner))
}

/// Complete bipartite graph `K_{a,b}`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    build(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
}

/// A graph with its catalog name.
#[derive(Debug, Clone)]
pub struct NamedGraph {
    pub name: String,
    pub graph: Graph,
}

impl NamedGraph {
    fn new(name: impl Into<String>, graph: Graph) -> Self {
        Self {
            name: name.into(),
            graph,
        }
    }
}

/// Paths, cycles, stars, complete graphs and barbells on at most six nodes.
pub fn small_catalog() -> Vec<NamedGraph> {
    let mut out = Vec::new();
    for n in 2..=6 {
        out.push(NamedGraph::new(format!("path-{n}"), path(n)));
    }
    for n in 3..=6 {
        out.push(NamedGraph::new(format!("cycle-{n}"), cycle(n)));
    }
    for n in 3..=6 {
        out.push(NamedGraph::new(format!("star-{n}"), star(n)));
    }
    for n in 2..=6 {
        out.push(NamedGraph::new(format!("complete-{n}"), complete(n)));
    }
    for c in 2..=3 {
        out.push(NamedGraph::new(format!("barbell-{}", 2 * c), barbell(c)));
    }
    out
}

/// Regular graphs of degree at least two.
pub fn regular_catalog() -> Vec<NamedGraph> {
    vec![
        NamedGraph::new("cycle-8", cycle(8)),
        NamedGraph::new("cycle-11", cycle(11)),
        NamedGraph::new("circulant-12-1-2", circulant(12, &[1, 2])),
        NamedGraph::new("circulant-15-1-3-5", circulant(15, &[1, 3, 5])),
        NamedGraph::new("circulant-20-1-4-9", circulant(20, &[1, 4, 9])),
        NamedGraph::new("hypercube-4", hypercube(4)),
        NamedGraph::new("petersen", petersen()),
        NamedGraph::new("complete-bipartite-4-4", complete_bipartite(4, 4)),
        NamedGraph::new("complete-7", complete(7)),
    ]
}

/// Erdos-Renyi `G(n, p)`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build(n, edges)
}

/// Random connected graph: a random spanning tree plus `extra` random edges.
pub fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(n + extra);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        edges.push((parent, order[i]));
    }
    if n >= 2 {
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            edges.push((u, v));
        }
    }
    build(n, edges)
}

/// Random circulant graph with `count` distinct offsets in `1..n/2`. Regular.
pub fn random_circulant(n: usize, count: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<usize> = (1..n.div_ceil(2)).collect();
    candidates.shuffle(&mut rng);
    candidates.truncate(count.max(1));
    circulant(n, &candidates)
}

/// Planted-community graph: `blocks` groups of `size` nodes with internal
/// edge probability `p_in` and cross probability `p_out`.
pub fn planted_partition(blocks: usize, size: usize, p_in: f64, p_out: f64, seed: u64) -> Graph {
    let n = blocks * size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / size == v / size { p_in } else { p_out };
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_shapes() {
        assert_eq!(path(4).edge_count(), 3);
        assert_eq!(cycle(5).degrees(), &[2; 5]);
        assert_eq!(star(5).degree(0), 4);
        assert_eq!(complete(6).edge_count(), 15);
        assert_eq!(barbell(3).edge_count(), 7);
        assert_eq!(petersen().degrees(), &[3; 10]);
        assert_eq!(hypercube(3).degrees(), &[3; 8]);
        assert_eq!(complete_bipartite(2, 3).edge_count(), 6);
    }

    #[test]
    fn regular_catalog_is_regular() {
        for g in regular_catalog() {
            let d = g.graph.degree(0);
            assert!(d >= 2, "{}", g.name);
            assert!(g.graph.degrees().iter().all(|&x| x == d), "{}", g.name);
            g.graph.validate().unwrap();
        }
    }

    #[test]
    fn small_catalog_bounds() {
        let cat = small_catalog();
        assert!(cat.iter().all(|g| g.graph.node_count() <= 6));
        let families: std::collections::HashSet<_> = cat
            .iter()
            .map(|g| g.name.split('-').next().unwrap().to_string())
            .collect();
        assert_eq!(families.len(), 5);
    }

    #[test]
    fn random_generators_are_seeded() {
        assert_eq!(erdos_renyi(30, 0.2, 7), erdos_renyi(30, 0.2, 7));
        let g = random_connected(50, 20, 3);
        let reach = crate::heuristics::bfs_distances(&g, 0);
        assert!(reach.iter().all(|&d| d != usize::MAX));
        let c = random_circulant(13, 3, 1);
        let d = c.degree(0);
        assert!(c.degrees().iter().all(|&x| x == d));
    }
}
