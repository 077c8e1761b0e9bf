//! Catalog verification: brute-force path sums, the two-step identity and
//! spectral diagnostics per graph and weight scheme.

use serde::Serialize;

use crate::catalog::{self, NamedGraph};
use crate::error::Result;
use crate::operator::{build_transition_operator, TransitionOperator, WeightScheme};
use crate::spectral::{self, PATH_SUM_MAX_NODES};
use crate::walk::{score_pair, WalkConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub max_steps: usize,
    pub path_sum_tolerance: f64,
    pub identity_tolerance: f64,
    pub eigen_tolerance: f64,
    pub schemes: Vec<WeightScheme>,
    pub dense_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            max_steps: 4,
            path_sum_tolerance: 1e-9,
            identity_tolerance: 1e-10,
            eigen_tolerance: 1e-8,
            schemes: WeightScheme::ALL.to_vec(),
            dense_cap: spectral::DEFAULT_DENSE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRecord {
    pub graph: String,
    pub scheme: WeightScheme,
    /// `None` when the operator is not symmetric and no spectrum is computed.
    pub gap: Option<f64>,
    pub lambda_min: Option<f64>,
    pub bound_assumption_ok: bool,
    pub degenerate: bool,
    pub identity_max_residual: f64,
    /// `None` for graphs too large to enumerate.
    pub path_sum_max_residual: Option<f64>,
    pub eigen_max_residual: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub records: Vec<VerifyRecord>,
    pub passed: bool,
}

/// Small catalog plus a bipartite graph, where the noise bound is inapplicable.
pub fn default_catalog() -> Vec<NamedGraph> {
    let mut cat = catalog::small_catalog();
    cat.push(NamedGraph {
        name: "complete-bipartite-2-3".into(),
        graph: catalog::complete_bipartite(2, 3),
    });
    cat
}

fn eigen_residual(op: &TransitionOperator, report: &spectral::SpectralReport) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, &lambda) in report.eigenvalues.iter().enumerate() {
        let v = report.eigenvector(i);
        let pv = op.matvec(&v)?;
        for (a, b) in pv.iter().zip(&v) {
            worst = worst.max((a - lambda * b).abs());
        }
    }
    Ok(worst)
}

/// Checks one graph under `op`, which normally is the operator built from
/// `named.graph` with `scheme`. Path sums are recomputed from the graph alone,
/// so a tampered operator shows up as a path-sum residual.
pub fn verify_graph(
    named: &NamedGraph,
    op: &TransitionOperator,
    scheme: WeightScheme,
    opts: &VerifyOptions,
) -> Result<VerifyRecord> {
    let graph = &named.graph;
    let n = graph.node_count();

    let mut identity_max = 0.0f64;
    for j in 0..n {
        for t in 0..n {
            identity_max = identity_max.max(spectral::unification_check(graph, op, j, t)?.identity_residual);
        }
    }

    let path_sum_max = if n <= PATH_SUM_MAX_NODES {
        let mut worst = 0.0f64;
        for k in 1..=opts.max_steps.min(spectral::PATH_SUM_MAX_STEPS) {
            let cfg = WalkConfig {
                steps: k,
                scheme,
                ..WalkConfig::default()
            };
            for j in 0..n {
                for t in 0..n {
                    let amp = spectral::path_sum_amplitude(graph, scheme, j, t, k)?;
                    worst = worst.max((amp * amp - score_pair(op, j, t, &cfg)?).abs());
                }
            }
        }
        Some(worst)
    } else {
        None
    };

    let spectrum = if op.is_symmetric() && n >= 2 && n <= opts.dense_cap {
        Some(spectral::eigendecompose(op, opts.dense_cap)?)
    } else {
        None
    };
    let eigen_max = spectrum.as_ref().map(|s| eigen_residual(op, s)).transpose()?;

    let passed = identity_max <= opts.identity_tolerance
        && path_sum_max.is_none_or(|r| r <= opts.path_sum_tolerance)
        && eigen_max.is_none_or(|r| r <= opts.eigen_tolerance);
    Ok(VerifyRecord {
        graph: named.name.clone(),
        scheme,
        gap: spectrum.as_ref().map(|s| s.gap),
        lambda_min: spectrum.as_ref().map(|s| s.lambda_min),
        bound_assumption_ok: spectrum.as_ref().is_some_and(|s| s.bound_assumption_ok),
        degenerate: spectrum.as_ref().is_some_and(|s| s.degenerate),
        identity_max_residual: identity_max,
        path_sum_max_residual: path_sum_max,
        eigen_max_residual: eigen_max,
        passed,
    })
}

pub type Tamper = dyn Fn(&mut TransitionOperator) -> Result<()>;

/// Verifies every graph under every configured scheme. `tamper` may modify
/// each operator before checking; it exists to exercise the failure path.
pub fn verify_catalog(graphs: &[NamedGraph], opts: &VerifyOptions, tamper: Option<&Tamper>) -> Result<VerifyReport> {
    let mut records = Vec::new();
    for named in graphs {
        for &scheme in &opts.schemes {
            let mut op = build_transition_operator(&named.graph, scheme);
            if let Some(f) = tamper {
                f(&mut op)?;
            }
            records.push(verify_graph(named, &op, scheme, opts)?);
        }
    }
    let passed = records.iter().all(|r| r.passed);
    Ok(VerifyReport {
        options: opts.clone(),
        records,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_passes() {
        let report = verify_catalog(&default_catalog(), &VerifyOptions::default(), None).unwrap();
        assert!(report.passed, "{:#?}", report.records.iter().find(|r| !r.passed));
        let bip = report
            .records
            .iter()
            .find(|r| r.graph == "complete-bipartite-2-3" && r.scheme == WeightScheme::Uniform)
            .unwrap();
        assert!(!bip.bound_assumption_ok);
        assert_eq!(bip.lambda_min.map(|l| (l + 1.0).abs() < 1e-9), Some(true));
    }

    #[test]
    fn tampered_operator_fails() {
        let tamper = |op: &mut TransitionOperator| op.perturb_entry(0, 1, 1e-3);
        let opts = VerifyOptions {
            schemes: vec![WeightScheme::Uniform],
            ..VerifyOptions::default()
        };
        let report = verify_catalog(
            &[NamedGraph {
                name: "path-3".into(),
                graph: catalog::path(3),
            }],
            &opts,
            Some(&tamper),
        )
        .unwrap();
        assert!(!report.passed);
    }
}
