//! Immutable undirected graphs in compressed sparse row form, edge-list
//! ingestion, train/valid/test splits and a binary container format.
//!
//! Every graph built here is symmetric, loop-free and free of duplicate
//! neighbors; input direction and edge weights are discarded on load.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Unordered node pair as stored in split lists and score tables.
pub type Pair = (usize, usize);

/// Canonical `(min, max)` form of an unordered pair.
#[inline]
pub fn unordered(u: usize, v: usize) -> Pair {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    degrees: Vec<usize>,
}

impl Graph {
    /// Builds a graph over `node_count` nodes from arbitrary (possibly
    /// directed, duplicated or looping) edges.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Pair>,
    {
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); node_count];
        for (u, v) in edges {
            for id in [u, v] {
                if id >= node_count {
                    return Err(Error::NodeOutOfRange { id, node_count });
                }
            }
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut neighbors = Vec::new();
        let mut degrees = Vec::with_capacity(node_count);
        offsets.push(0);
        for mut row in adjacency {
            row.sort_unstable();
            row.dedup();
            degrees.push(row.len());
            neighbors.extend_from_slice(&row);
            offsets.push(neighbors.len());
        }
        Ok(Self {
            node_count,
            offsets,
            neighbors,
            degrees,
        })
    }

    /// Graph with `node_count` nodes and no edges.
    pub fn empty(node_count: usize) -> Self {
        Self {
            node_count,
            offsets: vec![0; node_count + 1],
            neighbors: Vec::new(),
            degrees: vec![0; node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn neighbor_array(&self) -> &[usize] {
        &self.neighbors
    }

    /// Sorted neighbor row of `u`.
    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.degrees[u]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count == 0 {
            0.0
        } else {
            self.neighbors.len() as f64 / self.node_count as f64
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count && v < self.node_count && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn check_node(&self, id: usize) -> Result<()> {
        if id < self.node_count {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                id,
                node_count: self.node_count,
            })
        }
    }

    /// Undirected edges as `(u, v)` with `u < v`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = Pair> + '_ {
        (0..self.node_count).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Number of unordered non-adjacent pairs of distinct nodes.
    pub fn non_edge_count(&self) -> usize {
        let n = self.node_count;
        (n * n.saturating_sub(1)) / 2 - self.edge_count()
    }

    /// Returns a graph with the same node set and the union of edges.
    pub fn with_extra_edges<I>(&self, extra: I) -> Result<Self>
    where
        I: IntoIterator<Item = Pair>,
    {
        Self::from_edges(self.node_count, self.edges().chain(extra))
    }

    /// Checks the structural invariants. Used when reading containers.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidContainer(msg));
        if self.offsets.len() != self.node_count + 1 || self.degrees.len() != self.node_count {
            return bad("array lengths disagree with node count".into());
        }
        if self.offsets[0] != 0 || self.offsets[self.node_count] != self.neighbors.len() {
            return bad("offsets do not span the neighbor array".into());
        }
        for u in 0..self.node_count {
            if self.offsets[u] > self.offsets[u + 1] {
                return bad(format!("offsets decrease at row {u}"));
            }
            let row = self.neighbors(u);
            if self.degrees[u] != row.len() {
                return bad(format!("degree mismatch at row {u}"));
            }
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return bad(format!("row {u} is unsorted or has duplicates"));
                }
            }
            for &v in row {
                if v >= self.node_count {
                    return bad(format!("neighbor {v} out of range in row {u}"));
                }
                if v == u {
                    return bad(format!("self-loop at {u}"));
                }
                if !self.has_edge(v, u) {
                    return bad(format!("edge ({u}, {v}) has no reverse"));
                }
            }
        }
        Ok(())
    }

    /// Writes one `u v` line per undirected edge (`u < v`).
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

/// Magic bytes of the binary graph container.
pub const CONTAINER_MAGIC: [u8; 8] = *b"QWGRAPH\0";
/// Current container version.
pub const CONTAINER_VERSION: u32 = 1;

impl Graph {
    /// Serializes the CSR arrays into the binary container.
    ///
    /// Layout, all integers little-endian:
    ///
    /// ```text
    /// offset  size        field
    /// 0       8           magic "QWGRAPH\0"
    /// 8       4           version (u32) = 1
    /// 12      4           reserved (u32) = 0
    /// 16      8           node_count N (u64)
    /// 24      8           neighbor entries M = 2 * edges (u64)
    /// 32      8 * (N+1)   csr offsets (u64)
    /// ..      4 * M       csr neighbors (u32)
    /// ```
    ///
    /// Degrees are not stored; they are the offset differences.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        if self.node_count > u32::MAX as usize {
            return Err(Error::InvalidParameter(
                "graphs above u32::MAX nodes cannot be serialized".into(),
            ));
        }
        out.write_all(&CONTAINER_MAGIC)?;
        out.write_all(&CONTAINER_VERSION.to_le_bytes())?;
        out.write_all(&0u32.to_le_bytes())?;
        out.write_all(&(self.node_count as u64).to_le_bytes())?;
        out.write_all(&(self.neighbors.len() as u64).to_le_bytes())?;
        for &o in &self.offsets {
            out.write_all(&(o as u64).to_le_bytes())?;
        }
        for &v in &self.neighbors {
            out.write_all(&(v as u32).to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads and validates a container produced by [`Graph::write_binary`].
    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut header = [0u8; 16];
        input
            .read_exact(&mut header)
            .map_err(|_| Error::InvalidContainer("truncated header".into()))?;
        if header[..8] != CONTAINER_MAGIC {
            return Err(Error::InvalidContainer("bad magic".into()));
        }
        let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
        if version != CONTAINER_VERSION {
            return Err(Error::InvalidContainer(format!("unsupported version {version}")));
        }
        let read_u64 = |input: &mut R| -> Result<u64> {
            let mut b = [0u8; 8];
            input
                .read_exact(&mut b)
                .map_err(|_| Error::InvalidContainer("truncated body".into()))?;
            Ok(u64::from_le_bytes(b))
        };
        let node_count = read_u64(&mut input)? as usize;
        let entries = read_u64(&mut input)? as usize;
        let mut offsets = Vec::with_capacity(node_count + 1);
        for _ in 0..=node_count {
            offsets.push(read_u64(&mut input)? as usize);
        }
        let mut raw = vec![0u8; entries * 4];
        input
            .read_exact(&mut raw)
            .map_err(|_| Error::InvalidContainer("truncated neighbor array".into()))?;
        let neighbors: Vec<usize> = raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
            .collect();
        let degrees = offsets.windows(2).map(|w| w[1].wrapping_sub(w[0])).collect();
        let graph = Self {
            node_count,
            offsets,
            neighbors,
            degrees,
        };
        graph.validate()?;
        Ok(graph)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    /// Whitespace or comma, whichever appears.
    #[default]
    Auto,
    Whitespace,
    Comma,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub comment_prefix: String,
    pub delimiter: Delimiter,
    /// Input ids start at 1; they are shifted down by one.
    pub one_indexed: bool,
    /// Fixed node count; otherwise `1 + max id`.
    pub node_count: Option<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            comment_prefix: "#".to_string(),
            delimiter: Delimiter::Auto,
            one_indexed: false,
            node_count: None,
        }
    }
}

/// Reads raw `(u, v)` id pairs, one per line. Columns past the second are ignored.
pub fn read_pairs<R: BufRead>(input: R, opts: &LoadOptions) -> Result<Vec<(u64, u64)>> {
    let mut pairs = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || (!opts.comment_prefix.is_empty() && trimmed.starts_with(&opts.comment_prefix)) {
            continue;
        }
        let tokens: Vec<&str> = match opts.delimiter {
            Delimiter::Auto => trimmed
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect(),
            Delimiter::Whitespace => trimmed.split_whitespace().collect(),
            Delimiter::Comma => trimmed.split(',').map(str::trim).collect(),
        };
        if tokens.len() < 2 {
            return Err(Error::MalformedLine {
                line: lineno,
                content: line,
            });
        }
        let mut ids = [0u64; 2];
        for (slot, tok) in ids.iter_mut().zip(&tokens[..2]) {
            let raw: i64 = tok.parse().map_err(|_| Error::MalformedLine {
                line: lineno,
                content: line.clone(),
            })?;
            let shifted = if opts.one_indexed { raw - 1 } else { raw };
            if shifted < 0 {
                return Err(Error::NegativeNodeId { line: lineno, id: raw });
            }
            *slot = shifted as u64;
        }
        pairs.push((ids[0], ids[1]));
    }
    Ok(pairs)
}

fn dense_pairs(raw: &[(u64, u64)]) -> Result<Vec<Pair>> {
    raw.iter()
        .map(|&(u, v)| {
            let cast =
                |x: u64| usize::try_from(x).map_err(|_| Error::InvalidParameter(format!("node id {x} too large")));
            Ok((cast(u)?, cast(v)?))
        })
        .collect()
}

/// Parses an edge list into a symmetrized, deduplicated, loop-free graph.
pub fn load_edge_list<R: BufRead>(input: R, opts: &LoadOptions) -> Result<Graph> {
    let pairs = dense_pairs(&read_pairs(input, opts)?)?;
    let inferred = pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let node_count = opts.node_count.unwrap_or(inferred);
    if node_count == 0 {
        return Err(Error::EmptyGraph);
    }
    Graph::from_edges(node_count, pairs)
}

/// Mapping between dense node ids and the ids found in the input.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    original: Vec<u64>,
    dense: HashMap<u64, usize>,
}

impl IdMap {
    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    /// Dense id of `id`, assigning the next free one on first sight.
    pub fn intern(&mut self, id: u64) -> usize {
        let next = self.original.len();
        *self.dense.entry(id).or_insert_with(|| {
            self.original.push(id);
            next
        })
    }

    pub fn dense(&self, original: u64) -> Option<usize> {
        self.dense.get(&original).copied()
    }

    pub fn original(&self, dense: usize) -> Option<u64> {
        self.original.get(dense).copied()
    }

    /// Maps raw pairs; ids never seen by the map are an error.
    pub fn map_pairs(&self, raw: &[(u64, u64)]) -> Result<Vec<Pair>> {
        raw.iter()
            .map(|&(u, v)| {
                let get = |x: u64| {
                    self.dense(x)
                        .ok_or_else(|| Error::InvalidParameter(format!("node id {x} not present in the id map")))
                };
                Ok((get(u)?, get(v)?))
            })
            .collect()
    }

    /// One `dense original` line per node.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for (dense, original) in self.original.iter().enumerate() {
            writeln!(out, "{dense} {original}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut map = Self::default();
        for (dense, (d, original)) in read_pairs(input, &LoadOptions::default())?.into_iter().enumerate() {
            if d as usize != dense {
                return Err(Error::InvalidParameter(format!(
                    "id map line {} is out of order",
                    dense + 1
                )));
            }
            map.intern(original);
        }
        Ok(map)
    }
}

/// Like [`load_edge_list`] but relabels ids densely in order of first
/// appearance and returns the mapping.
pub fn load_edge_list_relabeled<R: BufRead>(input: R, opts: &LoadOptions) -> Result<(Graph, IdMap)> {
    let raw = read_pairs(input, opts)?;
    let mut map = IdMap::default();
    let pairs: Vec<Pair> = raw.iter().map(|&(u, v)| (map.intern(u), map.intern(v))).collect();
    let node_count = opts.node_count.unwrap_or(map.len()).max(map.len());
    if node_count == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok((Graph::from_edges(node_count, pairs)?, map))
}

/// Train / validation / test edge partition.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SplitSet {
    pub train: Vec<Pair>,
    pub valid: Vec<Pair>,
    pub test: Vec<Pair>,
}

impl SplitSet {
    /// Validates bounds, self-pairs and cross-split disjointness.
    pub fn new(train: Vec<Pair>, valid: Vec<Pair>, test: Vec<Pair>, node_count: usize) -> Result<Self> {
        let splits = Self { train, valid, test };
        splits.validate(node_count)?;
        Ok(splits)
    }

    pub fn validate(&self, node_count: usize) -> Result<()> {
        let named = [("train", &self.train), ("valid", &self.valid), ("test", &self.test)];
        let mut owner: HashMap<Pair, &'static str> = HashMap::new();
        for (name, list) in named {
            for &(u, v) in list.iter() {
                for id in [u, v] {
                    if id >= node_count {
                        return Err(Error::NodeOutOfRange { id, node_count });
                    }
                }
                if u == v {
                    return Err(Error::SelfPairInSplit(u, v));
                }
                let key = unordered(u, v);
                match owner.get(&key) {
                    Some(&first) if first != name => {
                        return Err(Error::OverlappingSplits {
                            u: key.0,
                            v: key.1,
                            first,
                            second: name,
                        })
                    }
                    Some(_) => {}
                    None => {
                        owner.insert(key, name);
                    }
                }
            }
        }
        Ok(())
    }

    /// Graph on the training edges only.
    pub fn train_graph(&self, node_count: usize) -> Result<Graph> {
        Graph::from_edges(node_count, self.train.iter().copied())
    }

    /// Graph on all three splits; the reference for "is this a non-edge".
    pub fn full_graph(&self, node_count: usize) -> Result<Graph> {
        Graph::from_edges(
            node_count,
            self.train.iter().chain(&self.valid).chain(&self.test).copied(),
        )
    }

    /// Shuffles the undirected edges of `graph` and cuts them by `ratios`
    /// (train, valid, test), normalized to sum to one.
    pub fn random(graph: &Graph, ratios: [f64; 3], seed: u64) -> Result<Self> {
        if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) || ratios.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidParameter(format!("bad split ratios {ratios:?}")));
        }
        let total: f64 = ratios.iter().sum();
        let mut edges: Vec<Pair> = graph.edges().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        edges.shuffle(&mut rng);
        let m = edges.len();
        let n_valid = ((ratios[1] / total) * m as f64).round() as usize;
        let n_test = ((ratios[2] / total) * m as f64).round() as usize;
        let n_test = n_test.min(m);
        let n_valid = n_valid.min(m - n_test);
        let test = edges.split_off(m - n_test);
        let valid = edges.split_off(edges.len() - n_valid);
        Ok(Self {
            train: edges,
            valid,
            test,
        })
    }
}

/// Training graph extended with validation edges. Test edges are never added.
pub fn merge_validation_edges(graph: &Graph, splits: &SplitSet) -> Result<Graph> {
    graph.with_extra_edges(splits.valid.iter().copied())
}

/// Distinct unordered pairs, order of first appearance.
pub fn dedup_pairs(pairs: &[Pair]) -> Vec<Pair> {
    let mut seen = HashSet::new();
    pairs
        .iter()
        .copied()
        .filter(|&(u, v)| seen.insert(unordered(u, v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn load(text: &str) -> Result<Graph> {
        load_edge_list(Cursor::new(text), &LoadOptions::default())
    }

    #[test]
    fn path_from_lines() {
        let g = load("0 1\n1 2\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.degrees(), &[1, 2, 1]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn duplicates_and_loops_collapse() {
        let g = load("0 1\n1 0\n0 0\n").unwrap();
        assert_eq!(g, Graph::from_edges(2, [(0, 1)]).unwrap());
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn comments_commas_and_weights() {
        let g = load("# header\n0,1,0.5\n\n1\t2 7\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn malformed_line_reports_number() {
        match load("0 1\nfoo bar\n") {
            Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("0\n"), Err(Error::MalformedLine { line: 1, .. })));
    }

    #[test]
    fn negative_and_empty() {
        assert!(matches!(load("0 -3\n"), Err(Error::NegativeNodeId { line: 1, id: -3 })));
        assert!(matches!(load("# nothing\n"), Err(Error::EmptyGraph)));
        let opts = LoadOptions {
            one_indexed: true,
            ..Default::default()
        };
        assert!(matches!(
            load_edge_list(Cursor::new("0 1\n"), &opts),
            Err(Error::NegativeNodeId { .. })
        ));
        let g = load_edge_list(Cursor::new("1 2\n2 3\n"), &opts).unwrap();
        assert_eq!(g.degrees(), &[1, 2, 1]);
    }

    #[test]
    fn explicit_node_count_keeps_isolated_nodes() {
        let opts = LoadOptions {
            node_count: Some(5),
            ..Default::default()
        };
        let g = load_edge_list(Cursor::new("0 1\n"), &opts).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.degree(4), 0);
        let small = LoadOptions {
            node_count: Some(1),
            ..Default::default()
        };
        assert!(matches!(
            load_edge_list(Cursor::new("0 1\n"), &small),
            Err(Error::NodeOutOfRange { id: 1, .. })
        ));
    }

    #[test]
    fn relabel_round_trip() {
        let (g, map) = load_edge_list_relabeled(Cursor::new("100 7\n7 42\n"), &LoadOptions::default()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(map.dense(100), Some(0));
        assert_eq!(map.original(2), Some(42));
        let mut buf = Vec::new();
        map.write(&mut buf).unwrap();
        assert_eq!(IdMap::read(Cursor::new(buf)).unwrap(), map);
        assert_eq!(map.map_pairs(&[(42, 100)]).unwrap(), vec![(2, 0)]);
        assert!(map.map_pairs(&[(5, 100)]).is_err());
    }

    #[test]
    fn merge_validation() {
        let splits = SplitSet::new(vec![(0, 1)], vec![(1, 2)], vec![], 3).unwrap();
        let train = splits.train_graph(3).unwrap();
        let merged = merge_validation_edges(&train, &splits).unwrap();
        assert_eq!(merged, Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap());

        let no_valid = SplitSet::new(vec![(0, 1)], vec![], vec![(1, 2)], 3).unwrap();
        let train = no_valid.train_graph(3).unwrap();
        assert_eq!(merge_validation_edges(&train, &no_valid).unwrap(), train);
    }

    #[test]
    fn merge_dedups_shared_edge() {
        let train = Graph::from_edges(3, [(0, 1)]).unwrap();
        let splits = SplitSet {
            train: vec![(0, 1)],
            valid: vec![(1, 0)],
            test: vec![],
        };
        let merged = merge_validation_edges(&train, &splits).unwrap();
        assert_eq!(merged.edge_count(), 1);
    }

    #[test]
    fn split_validation_errors() {
        assert!(matches!(
            SplitSet::new(vec![(0, 1)], vec![(1, 0)], vec![], 3),
            Err(Error::OverlappingSplits { .. })
        ));
        assert!(matches!(
            SplitSet::new(vec![(0, 0)], vec![], vec![], 3),
            Err(Error::SelfPairInSplit(0, 0))
        ));
        assert!(matches!(
            SplitSet::new(vec![(0, 3)], vec![], vec![], 3),
            Err(Error::NodeOutOfRange { id: 3, .. })
        ));
    }

    #[test]
    fn random_split_partitions_edges() {
        let edges: Vec<Pair> = (0..40).map(|i| (i, (i + 1) % 40)).collect();
        let g = Graph::from_edges(40, edges).unwrap();
        let s = SplitSet::random(&g, [0.85, 0.05, 0.10], 3).unwrap();
        assert_eq!(s.train.len() + s.valid.len() + s.test.len(), 40);
        assert_eq!(s.test.len(), 4);
        assert_eq!(s.valid.len(), 2);
        s.validate(40).unwrap();
        assert_eq!(s, SplitSet::random(&g, [0.85, 0.05, 0.10], 3).unwrap());
        assert_eq!(s.full_graph(40).unwrap(), g);
    }

    #[test]
    fn binary_container_round_trip_and_rejects_garbage() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (4, 5)]).unwrap();
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"QWGRAPH\0");
        assert_eq!(buf.len(), 16 + 16 + 8 * 7 + 4 * 8);
        assert_eq!(Graph::read_binary(Cursor::new(&buf)).unwrap(), g);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(Graph::read_binary(Cursor::new(&bad)).is_err());
        assert!(Graph::read_binary(Cursor::new(&buf[..buf.len() - 1])).is_err());
        // Drop the reverse of edge (0,1): neighbor 1 in row 0 becomes 3.
        let mut asym = buf.clone();
        let first_neighbor = 32 + 8 * 7;
        asym[first_neighbor..first_neighbor + 4].copy_from_slice(&3u32.to_le_bytes());
        assert!(Graph::read_binary(Cursor::new(&asym)).is_err());
    }
}
