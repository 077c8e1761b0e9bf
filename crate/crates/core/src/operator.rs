//! The normalized transition operator `S^{-1/2} W S^{-1/2}` built from a
//! scheme-weighted adjacency `W` with row sums `S`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Reweighting of the adjacency before normalization.
///
/// `W[j][k] = A[j][k] * w(k)`, where `w(k)` depends on the degree of the
/// column node: 1 (uniform), `1/d_k` (inverse-degree), `1/ln d_k`
/// (inverse-log-degree, zero when `d_k <= 1`). The two reweighted schemes
/// produce an operator that is symmetric only on regular graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightScheme {
    #[default]
    Uniform,
    InverseDegree,
    InverseLogDegree,
}

impl WeightScheme {
    /// Weight carried by edges into a node of degree `degree`.
    pub fn node_weight(self, degree: usize) -> f64 {
        match self {
            WeightScheme::Uniform => 1.0,
            WeightScheme::InverseDegree => {
                if degree == 0 {
                    0.0
                } else {
                    1.0 / degree as f64
                }
            }
            WeightScheme::InverseLogDegree => {
                if degree <= 1 {
                    0.0
                } else {
                    1.0 / (degree as f64).ln()
                }
            }
        }
    }

    pub const ALL: [WeightScheme; 3] = [
        WeightScheme::Uniform,
        WeightScheme::InverseDegree,
        WeightScheme::InverseLogDegree,
    ];
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightScheme::Uniform => "uniform",
            WeightScheme::InverseDegree => "inverse-degree",
            WeightScheme::InverseLogDegree => "inverse-log-degree",
        })
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "a" => Ok(WeightScheme::Uniform),
            "inverse-degree" | "ra" => Ok(WeightScheme::InverseDegree),
            "inverse-log-degree" | "aa" => Ok(WeightScheme::InverseLogDegree),
            other => Err(Error::InvalidParameter(format!("unknown weight scheme {other:?}"))),
        }
    }
}

/// Sparse operator sharing the CSR pattern of its graph. Row `i` holds the
/// entries `P[i][j]` for neighbors `j`, so `matvec` computes `P x`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionOperator {
    node_count: usize,
    offsets: Vec<usize>,
    columns: Vec<usize>,
    values: Vec<f64>,
    scheme: WeightScheme,
}

/// Builds the normalized transition operator. Nodes whose weighted row sum
/// is zero get all-zero rows and columns.
pub fn build_transition_operator(graph: &Graph, scheme: WeightScheme) -> TransitionOperator {
    let n = graph.node_count();
    let node_weight: Vec<f64> = graph.degrees().iter().map(|&d| scheme.node_weight(d)).collect();
    let row_sums: Vec<f64> = (0..n)
        .map(|i| graph.neighbors(i).iter().map(|&k| node_weight[k]).sum())
        .collect();
    let inv_sqrt: Vec<f64> = row_sums
        .iter()
        .map(|&s| if s > 0.0 { 1.0 / s.sqrt() } else { 0.0 })
        .collect();

    let mut values = Vec::with_capacity(graph.neighbor_array().len());
    for i in 0..n {
        for &k in graph.neighbors(i) {
            values.push(node_weight[k] * (inv_sqrt[i] * inv_sqrt[k]));
        }
    }
    TransitionOperator {
        node_count: n,
        offsets: graph.offsets().to_vec(),
        columns: graph.neighbor_array().to_vec(),
        values,
        scheme,
    }
}

impl TransitionOperator {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored `(column, value)` entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.columns[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Entry `P[i][j]` (zero when not stored).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.offsets[i]..self.offsets[i + 1];
        match self.columns[range.clone()].binary_search(&j) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// `out = P x`.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.node_count {
            return Err(Error::DimensionMismatch {
                expected: self.node_count,
                actual: x.len(),
            });
        }
        if out.len() != self.node_count {
            return Err(Error::DimensionMismatch {
                expected: self.node_count,
                actual: out.len(),
            });
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.offsets[i]..self.offsets[i + 1] {
                acc += self.values[p] * x[self.columns[p]];
            }
            *slot = acc;
        }
        Ok(())
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.node_count];
        self.matvec_into(x, &mut out)?;
        Ok(out)
    }

    /// First stored entry whose mirror differs bit-wise, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.node_count).find_map(|i| {
            self.row(i)
                .find(|&(j, v)| self.get(j, i).to_bits() != v.to_bits())
                .map(|(j, _)| (i, j))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry().is_none()
    }

    /// Dense row-major copy, for small-graph verification.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.node_count]; self.node_count];
        for (i, row) in dense.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        dense
    }

    /// Adds `delta` to the stored entry `(i, j)`. Used by verification
    /// failure-path tests to corrupt an operator on purpose.
    pub fn perturb_entry(&mut self, i: usize, j: usize, delta: f64) -> Result<()> {
        let range = self.offsets[i]..self.offsets[i + 1];
        let pos = self.columns[range.clone()]
            .binary_search(&j)
            .map_err(|_| Error::InvalidParameter(format!("no stored entry at ({i}, {j})")))?;
        self.values[range.start + pos] += delta;
        Ok(())
    }
}
