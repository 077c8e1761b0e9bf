use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use anyhow::{bail, Context, Result};

use qwalk_core::graph::{self, CONTAINER_MAGIC};
use qwalk_core::{Graph, IdMap, LoadOptions, Pair, SplitSet};

use crate::config::DataConfig;

pub fn load_options(data: &DataConfig) -> LoadOptions {
    LoadOptions {
        one_indexed: data.one_indexed,
        ..LoadOptions::default()
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

pub fn read_raw_pairs(path: &Path, opts: &LoadOptions) -> Result<Vec<(u64, u64)>> {
    graph::read_pairs(open(path)?, opts).with_context(|| format!("reading {}", path.display()))
}

fn is_container(path: &Path) -> Result<bool> {
    let mut head = [0u8; 8];
    let mut file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut filled = 0;
    while filled < head.len() {
        match file.read(&mut head[filled..])? {
            0 => break,
            n => filled += n,
        }
    }
    Ok(filled == head.len() && head == CONTAINER_MAGIC)
}

/// Loads a graph from an edge list or a binary container. Relabeling
/// applies to edge lists only.
pub fn load_graph(path: &Path, data: &DataConfig) -> Result<(Graph, Option<IdMap>)> {
    if is_container(path)? {
        let g = Graph::read_binary(open(path)?).with_context(|| format!("reading {}", path.display()))?;
        return Ok((g, None));
    }
    let opts = load_options(data);
    if data.relabel {
        let (g, map) = graph::load_edge_list_relabeled(open(path)?, &opts)
            .with_context(|| format!("reading {}", path.display()))?;
        Ok((g, Some(map)))
    } else {
        let g = graph::load_edge_list(open(path)?, &opts).with_context(|| format!("reading {}", path.display()))?;
        Ok((g, None))
    }
}

fn to_dense(raw: &[(u64, u64)], map: Option<&IdMap>) -> Result<Vec<Pair>> {
    match map {
        Some(m) => Ok(m.map_pairs(raw)?),
        None => raw
            .iter()
            .map(|&(u, v)| Ok((usize::try_from(u)?, usize::try_from(v)?)))
            .collect(),
    }
}

/// Query pairs in the graph's id space.
pub fn load_pairs(path: &Path, data: &DataConfig, map: Option<&IdMap>) -> Result<Vec<Pair>> {
    to_dense(&read_raw_pairs(path, &load_options(data))?, map)
}

pub fn parse_pair(text: &str) -> Result<(u64, u64)> {
    let parts: Vec<&str> = text.split([',', ' ']).filter(|s| !s.is_empty()).collect();
    if parts.len() != 2 {
        bail!("pair {text:?} must look like u,v");
    }
    Ok((parts[0].parse()?, parts[1].parse()?))
}

pub fn shift_pair(raw: (u64, u64), data: &DataConfig) -> Result<(u64, u64)> {
    if !data.one_indexed {
        return Ok(raw);
    }
    if raw.0 == 0 || raw.1 == 0 {
        bail!("pair ({}, {}) has id 0 under one-indexed input", raw.0, raw.1);
    }
    Ok((raw.0 - 1, raw.1 - 1))
}

pub fn pairs_from_raw(raw: &[(u64, u64)], map: Option<&IdMap>) -> Result<Vec<Pair>> {
    to_dense(raw, map)
}

/// Train, validation and test files loaded into one id space.
pub struct SplitData {
    pub node_count: usize,
    pub splits: SplitSet,
    pub map: Option<IdMap>,
}

pub fn load_splits(data: &DataConfig) -> Result<SplitData> {
    let opts = load_options(data);
    let need = |p: &Option<std::path::PathBuf>, name: &str| -> Result<Vec<(u64, u64)>> {
        match p {
            Some(path) => read_raw_pairs(path, &opts),
            None if name == "valid" => Ok(Vec::new()),
            None => bail!("no {name} split file given (--{name} or data.{name})"),
        }
    };
    let train = need(&data.train, "train")?;
    let valid = need(&data.valid, "valid")?;
    let test = need(&data.test, "test")?;

    let map = if data.relabel {
        let mut m = IdMap::default();
        for &(u, v) in train.iter().chain(&valid).chain(&test) {
            m.intern(u);
            m.intern(v);
        }
        Some(m)
    } else {
        None
    };
    let train = to_dense(&train, map.as_ref())?;
    let valid = to_dense(&valid, map.as_ref())?;
    let test = to_dense(&test, map.as_ref())?;
    let node_count = match &map {
        Some(m) => m.len(),
        None => train
            .iter()
            .chain(&valid)
            .chain(&test)
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0),
    };
    if node_count == 0 {
        bail!("split files contain no edges");
    }
    let dedup = |p: Vec<Pair>| graph::dedup_pairs(&p);
    let splits = SplitSet::new(dedup(train), dedup(valid), dedup(test), node_count)?;
    Ok(SplitData {
        node_count,
        splits,
        map,
    })
}
