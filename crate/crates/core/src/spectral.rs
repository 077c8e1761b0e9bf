//! Dense spectral checks of the walk on small graphs: eigendecomposition,
//! noise-subspace trajectories, brute-force path sums and the two-step
//! identity linking the walk to neighborhood heuristics.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::heuristics;
use crate::operator::{TransitionOperator, WeightScheme};
use crate::walk::{evolve, evolve_state, init_state, AmplitudeVector, WalkConfig};

/// Largest graph accepted by [`eigendecompose`] unless overridden.
pub const DEFAULT_DENSE_CAP: usize = 2048;
/// Spectral gaps closer to zero than this are treated as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-12;

/// Eigen-structure of a symmetric transition operator.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Reflection eigenvalues `2 lambda - 1`, same order.
    pub mu: Vec<f64>,
    /// `1 - lambda_2`.
    pub gap: f64,
    pub lambda_min: f64,
    /// Every noise eigenvalue satisfies `|2 lambda_i - 1| <= 1 - 2 gap`.
    pub bound_assumption_ok: bool,
    /// Top eigenvalue is (numerically) repeated.
    pub degenerate: bool,
    /// `max_{i >= 2} |mu_i|`, the per-step contraction of the noise subspace.
    pub noise_contraction: f64,
    /// Orthonormal eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralReport {
    pub fn node_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    /// Norm of the component of `psi` orthogonal to the principal eigenvector.
    pub fn noise_norm(&self, psi: &[f64]) -> f64 {
        let v1 = self.eigenvectors.column(0);
        let overlap: f64 = v1.iter().zip(psi).map(|(a, b)| a * b).sum();
        psi.iter()
            .zip(v1.iter())
            .map(|(p, v)| {
                let r = p - overlap * v;
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Rayleigh-Ritz cleanup of an approximate orthonormal eigenbasis: the
/// projected matrix `V^T A V` is nearly diagonal, so a few cyclic Jacobi
/// sweeps bring the residual `A V - V diag` down to rounding level even
/// inside clusters of close eigenvalues.
fn refine_eigenpairs(a: &DMatrix<f64>, mut v: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut b = v.transpose() * a * &v;
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (b[(i, j)] + b[(j, i)]);
            b[(i, j)] = m;
            b[(j, i)] = m;
        }
    }
    for _ in 0..16 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let bpq = b[(p, q)];
                if bpq.abs() <= 1e-300 || bpq.abs() <= 1e-3 * f64::EPSILON * (b[(p, p)].abs() * b[(q, q)].abs()).sqrt()
                {
                    continue;
                }
                rotated = true;
                let theta = (b[(q, q)] - b[(p, p)]) / (2.0 * bpq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (bkp, bkq) = (b[(k, p)], b[(k, q)]);
                    b[(k, p)] = c * bkp - s * bkq;
                    b[(k, q)] = s * bkp + c * bkq;
                }
                for k in 0..n {
                    let (bpk, bqk) = (b[(p, k)], b[(q, k)]);
                    b[(p, k)] = c * bpk - s * bqk;
                    b[(q, k)] = s * bpk + c * bqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    ((0..n).map(|i| b[(i, i)]).collect(), v)
}

/// Full dense eigendecomposition of a symmetric operator with at most `cap` nodes.
pub fn eigendecompose(op: &TransitionOperator, cap: usize) -> Result<SpectralReport> {
    let n = op.node_count();
    if n > cap {
        return Err(Error::TooLarge { node_count: n, cap });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(
            "spectral analysis needs at least two nodes".into(),
        ));
    }
    if let Some((i, j)) = op.asymmetry() {
        return Err(Error::NotSymmetric(i, j));
    }
    let mut dense = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for (j, v) in op.row(i) {
            dense[(i, j)] = v;
        }
    }
    let eig = SymmetricEigen::new(dense.clone());
    let (values, vectors) = refine_eigenpairs(&dense, eig.eigenvectors);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        eigenvectors.set_column(col, &vectors.column(src));
    }

    let mu: Vec<f64> = eigenvalues.iter().map(|l| 2.0 * l - 1.0).collect();
    let gap = 1.0 - eigenvalues[1];
    let degenerate = gap.abs() < DEGENERATE_GAP || (eigenvalues[0] - eigenvalues[1]).abs() < DEGENERATE_GAP;
    let envelope = 1.0 - 2.0 * gap;
    let bound_assumption_ok = !degenerate && mu[1..].iter().all(|m| m.abs() <= envelope + DEGENERATE_GAP);
    let noise_contraction = mu[1..].iter().fold(0.0f64, |acc, m| acc.max(m.abs()));
    Ok(SpectralReport {
        lambda_min: eigenvalues[n - 1],
        eigenvalues,
        mu,
        gap,
        bound_assumption_ok,
        degenerate,
        noise_contraction,
        eigenvectors,
    })
}

/// Eigenbasis coefficients `c_i = <v_i | psi>`.
pub fn project_coefficients(report: &SpectralReport, psi: &[f64]) -> Result<Vec<f64>> {
    let n = report.node_count();
    if psi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: psi.len(),
        });
    }
    let c = report.eigenvectors.transpose() * DVector::from_column_slice(psi);
    Ok(c.iter().copied().collect())
}

/// `sum_i c_i v_i`.
pub fn reconstruct(report: &SpectralReport, coefficients: &[f64]) -> Vec<f64> {
    let v = &report.eigenvectors * DVector::from_column_slice(coefficients);
    v.iter().copied().collect()
}

/// Oracle-free `k`-step state computed in the eigenbasis: `sum_i mu_i^k c_i v_i`.
pub fn propagate_in_eigenbasis(report: &SpectralReport, psi0: &[f64], k: usize) -> Result<Vec<f64>> {
    let c = project_coefficients(report, psi0)?;
    let scaled: Vec<f64> = c
        .iter()
        .zip(&report.mu)
        .map(|(ci, mi)| ci * mi.powi(k as i32))
        .collect();
    Ok(reconstruct(report, &scaled))
}

/// Noise-subspace norms along a walk.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseTrajectory {
    /// `||Pi_noise psi_m||` for `m = 0..=k`.
    pub norms: Vec<f64>,
    /// `|1 - 2 gap|^m ||Pi_noise psi_0||`.
    pub gap_envelope: Vec<f64>,
    /// `rho^m ||Pi_noise psi_0||` with `rho` the noise contraction.
    pub contraction_envelope: Vec<f64>,
    /// The gap envelope is only asserted for oracle-free walks on operators
    /// satisfying `bound_assumption_ok`.
    pub bound_asserted: bool,
    pub bound_holds: Option<bool>,
    pub degenerate: bool,
}

pub fn noise_norm_trajectory(
    op: &TransitionOperator,
    report: &SpectralReport,
    j: usize,
    t: usize,
    k: usize,
    oracle: bool,
) -> Result<NoiseTrajectory> {
    let n = op.node_count();
    if report.node_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: report.node_count(),
        });
    }
    let mut states = vec![init_state(n, j)?];
    let step = WalkConfig {
        steps: 1,
        oracle,
        scheme: op.scheme(),
        ..WalkConfig::default()
    };
    for m in 0..k {
        states.push(evolve_state(op, &states[m], t, &step)?);
    }
    let norms: Vec<f64> = states.iter().map(|s| report.noise_norm(s.as_slice())).collect();
    let base = norms[0];
    let factor = (1.0 - 2.0 * report.gap).abs();
    let gap_envelope = (0..=k).map(|m| factor.powi(m as i32) * base).collect::<Vec<_>>();
    let contraction_envelope = (0..=k)
        .map(|m| report.noise_contraction.powi(m as i32) * base)
        .collect();
    let bound_asserted = !oracle && report.bound_assumption_ok && !report.degenerate;
    let bound_holds = bound_asserted.then(|| norms.iter().zip(&gap_envelope).all(|(v, e)| *v <= e + 1e-9));
    Ok(NoiseTrajectory {
        norms,
        gap_envelope,
        contraction_envelope,
        bound_asserted,
        bound_holds,
        degenerate: report.degenerate,
    })
}

/// Classical Katz-style noise ceiling `(1 - gap) / gap`.
pub fn classical_noise_bound(gap: f64) -> Result<f64> {
    if gap.is_nan() || gap <= DEGENERATE_GAP {
        return Err(Error::DegenerateSpectrum(format!(
            "classical bound needs a positive gap, got {gap}"
        )));
    }
    Ok((1.0 - gap) / gap)
}

/// Quantum noise probability bound `(1 - 2 gap)^(2k)`.
pub fn quantum_noise_bound(gap: f64, k: usize) -> f64 {
    (1.0 - 2.0 * gap).powi(2 * k as i32)
}

/// `(1 - 2 gap)^(2k) / ((1 - gap) / gap)`.
pub fn suppression_ratio(gap: f64, k: usize) -> Result<f64> {
    Ok(quantum_noise_bound(gap, k) / classical_noise_bound(gap)?)
}

/// Largest `n` and `k` accepted by [`path_sum_amplitude`].
pub const PATH_SUM_MAX_NODES: usize = 10;
pub const PATH_SUM_MAX_STEPS: usize = 5;

/// Dense reflection matrix `U[v][u] = 2 W[v][u] / sqrt(s_v s_u) - delta`,
/// computed directly from the graph (independent of the sparse operator).
fn dense_reflection(graph: &Graph, scheme: WeightScheme) -> Vec<Vec<f64>> {
    let n = graph.node_count();
    let weight: Vec<f64> = graph.degrees().iter().map(|&d| scheme.node_weight(d)).collect();
    let sums: Vec<f64> = (0..n)
        .map(|u| graph.neighbors(u).iter().map(|&v| weight[v]).sum())
        .collect();
    let mut u_mat = vec![vec![0.0; n]; n];
    for (a, row) in u_mat.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let adjacency = if graph.has_edge(a, b) { weight[b] } else { 0.0 };
            let transition = if adjacency == 0.0 || sums[a] == 0.0 || sums[b] == 0.0 {
                0.0
            } else {
                2.0 * adjacency / (sums[a] * sums[b]).sqrt()
            };
            *entry = transition - if a == b { 1.0 } else { 0.0 };
        }
    }
    u_mat
}

/// Target amplitude of the oracle-marked walk as a brute-force sum over all
/// node sequences `j = u_1, ..., u_{k+1} = t`. Each step contributes the
/// reflection entry for `u_l -> u_{l+1}`, and every post-step visit to `t`
/// contributes a factor of -1.
pub fn path_sum_amplitude(graph: &Graph, scheme: WeightScheme, j: usize, t: usize, k: usize) -> Result<f64> {
    let n = graph.node_count();
    if n > PATH_SUM_MAX_NODES || k > PATH_SUM_MAX_STEPS || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "path enumeration limited to n <= {PATH_SUM_MAX_NODES} and 1 <= k <= {PATH_SUM_MAX_STEPS} (got n={n}, k={k})"
        )));
    }
    graph.check_node(j)?;
    graph.check_node(t)?;
    let u_mat = dense_reflection(graph, scheme);
    let sign = |u: usize| if u == t { -1.0 } else { 1.0 };

    // Depth-first over intermediate nodes u_2..u_k; the last node is fixed to t.
    fn walk(
        u_mat: &[Vec<f64>],
        sign: &dyn Fn(usize) -> f64,
        current: usize,
        remaining: usize,
        t: usize,
        weight: f64,
    ) -> f64 {
        if remaining == 1 {
            return weight * u_mat[t][current] * sign(t);
        }
        (0..u_mat.len())
            .map(|next| {
                let w = u_mat[next][current];
                if w == 0.0 {
                    0.0
                } else {
                    walk(u_mat, sign, next, remaining - 1, t, weight * w * sign(next))
                }
            })
            .sum()
    }
    Ok(walk(&u_mat, &sign, j, k, t, 1.0))
}

/// Both sides of the oracle-free two-step identity
/// `<t|U^2|j> = 4 (P^2)[t][j] - 4 P[t][j] + delta_{jt}` plus the matching
/// classical heuristic for the scheme.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UnificationRecord {
    /// `<t|U^2|j>` from the walk simulation.
    pub quantum_amp: f64,
    /// Right-hand side from operator entries.
    pub identity_rhs: f64,
    pub identity_residual: f64,
    /// Degree-normalized CN (uniform), RA (inverse-degree) or AA (inverse-log-degree).
    pub heuristic_value: f64,
}

/// Two-step kernel `sum_k A_jk A_kt / (d_k sqrt(d_j d_t))`, i.e. `(P^2)[j][t]`
/// for the uniform operator.
pub fn degree_normalized_cn(graph: &Graph, j: usize, t: usize) -> f64 {
    let (dj, dt) = (graph.degree(j) as f64, graph.degree(t) as f64);
    if dj == 0.0 || dt == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for &k in graph.neighbors(j) {
        if graph.has_edge(k, t) {
            total += 1.0 / graph.degree(k) as f64;
        }
    }
    total / (dj * dt).sqrt()
}

pub fn unification_check(graph: &Graph, op: &TransitionOperator, j: usize, t: usize) -> Result<UnificationRecord> {
    let cfg = WalkConfig {
        steps: 2,
        oracle: false,
        scheme: op.scheme(),
        ..WalkConfig::default()
    };
    let quantum_amp = evolve(op, j, t, &cfg)?[t];
    let p2: f64 = op.row(t).map(|(m, p_tm)| p_tm * op.get(m, j)).sum();
    let delta = if j == t { 1.0 } else { 0.0 };
    let identity_rhs = 4.0 * p2 - 4.0 * op.get(t, j) + delta;
    let heuristic_value = match op.scheme() {
        WeightScheme::Uniform => degree_normalized_cn(graph, j, t),
        WeightScheme::InverseDegree => heuristics::ra_score(graph, j, t),
        WeightScheme::InverseLogDegree => heuristics::aa_score(graph, j, t),
    };
    Ok(UnificationRecord {
        quantum_amp,
        identity_rhs,
        identity_residual: (quantum_amp - identity_rhs).abs(),
        heuristic_value,
    })
}

/// Second eigenvalue of a symmetric operator by power iteration on
/// `(P + I) / 2` deflated against the principal direction `sqrt(row sums)`.
/// For graphs beyond the dense cap.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapEstimate {
    pub lambda2: f64,
    pub gap: f64,
    pub iterations: usize,
}

pub fn estimate_gap(op: &TransitionOperator, max_iter: usize, tol: f64, seed: u64) -> Result<GapEstimate> {
    let n = op.node_count();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "gap estimation needs at least two nodes".into(),
        ));
    }
    if let Some((i, j)) = op.asymmetry() {
        return Err(Error::NotSymmetric(i, j));
    }
    // Principal direction of D^{-1/2} A D^{-1/2} is sqrt(degree).
    let mut principal: Vec<f64> = (0..n).map(|i| (op.row(i).count() as f64).sqrt()).collect();
    let norm = principal.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        principal.iter_mut().for_each(|x| *x /= norm);
    }
    let deflate = |x: &mut [f64]| {
        let overlap: f64 = x.iter().zip(&principal).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(&principal).for_each(|(a, b)| *a -= overlap * b);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    deflate(&mut x);
    let mut estimate = 0.0;
    let mut iterations = 0;
    for it in 1..=max_iter {
        let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if x_norm == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= x_norm);
        let px = op.matvec(&x)?;
        let mut y: Vec<f64> = px.iter().zip(&x).map(|(p, v)| 0.5 * (p + v)).collect();
        deflate(&mut y);
        let rayleigh: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
        iterations = it;
        let converged = (rayleigh - estimate).abs() < tol;
        estimate = rayleigh;
        x = y;
        if converged {
            break;
        }
    }
    let lambda2 = 2.0 * estimate - 1.0;
    Ok(GapEstimate {
        lambda2,
        gap: 1.0 - lambda2,
        iterations,
    })
}

/// Uniform-scheme operator helper for callers holding only a graph.
pub fn uniform_spectrum(graph: &Graph, cap: usize) -> Result<SpectralReport> {
    eigendecompose(
        &crate::operator::build_transition_operator(graph, WeightScheme::Uniform),
        cap,
    )
}

/// Oracle-free walk state via the sparse simulation, for comparison with
/// [`propagate_in_eigenbasis`].
pub fn simulate_oracle_free(op: &TransitionOperator, psi0: &[f64], k: usize) -> Result<Vec<f64>> {
    let cfg = WalkConfig {
        steps: k,
        oracle: false,
        scheme: op.scheme(),
        ..WalkConfig::default()
    };
    Ok(evolve_state(op, &AmplitudeVector::from_vec(psi0.to_vec()), 0, &cfg)?.into_vec())
}
