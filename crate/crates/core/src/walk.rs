//! Coinless discrete-time quantum walk with a target phase-flip oracle.
//!
//! One step applies the reflection `U_T = 2P - I` followed by the oracle
//! `U_O = I - 2|t><t|`. All operators are real, so amplitudes are stored as
//! `f64`. States are never renormalized between steps.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Pair;
use crate::operator::{TransitionOperator, WeightScheme};

/// Upper bound on walk depth accepted by [`WalkConfig::validate`].
pub const MAX_STEPS: usize = 32;

/// Dense real walker amplitudes, one per node.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector(Vec<f64>);

impl AmplitudeVector {
    pub fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

impl std::ops::Index<usize> for AmplitudeVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoringMode {
    Naive,
    #[default]
    Batched,
}

impl fmt::Display for ScoringMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoringMode::Naive => "naive",
            ScoringMode::Batched => "batched",
        })
    }
}

impl FromStr for ScoringMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(ScoringMode::Naive),
            "batched" => Ok(ScoringMode::Batched),
            other => Err(Error::InvalidParameter(format!("unknown scoring mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub steps: usize,
    pub oracle: bool,
    pub scheme: WeightScheme,
    pub mode: ScoringMode,
    /// Divide `|psi_k[t]|^2` by `||psi_k||^2`. Off by default.
    pub normalize: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            steps: 2,
            oracle: true,
            scheme: WeightScheme::Uniform,
            mode: ScoringMode::Batched,
            normalize: false,
        }
    }
}

impl WalkConfig {
    pub fn with_steps(steps: usize) -> Self {
        Self {
            steps,
            ..Self::default()
        }
    }

    pub fn oracle(mut self, enabled: bool) -> Self {
        self.oracle = enabled;
        self
    }

    pub fn mode(mut self, mode: ScoringMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.steps > MAX_STEPS {
            return Err(Error::InvalidParameter(format!(
                "walk steps must lie in [1, {MAX_STEPS}], got {}",
                self.steps
            )));
        }
        Ok(())
    }
}

/// One-hot state at node `j`.
pub fn init_state(node_count: usize, j: usize) -> Result<AmplitudeVector> {
    if j >= node_count {
        return Err(Error::NodeOutOfRange { id: j, node_count });
    }
    let mut values = vec![0.0; node_count];
    values[j] = 1.0;
    Ok(AmplitudeVector(values))
}

/// `2 P psi - psi`.
pub fn apply_transition(op: &TransitionOperator, psi: &AmplitudeVector) -> Result<AmplitudeVector> {
    let mut out = vec![0.0; op.node_count()];
    reflect_into(op, &psi.0, &mut out)?;
    Ok(AmplitudeVector(out))
}

/// Negates entry `t`.
pub fn apply_oracle(psi: &AmplitudeVector, t: usize) -> Result<AmplitudeVector> {
    if t >= psi.len() {
        return Err(Error::NodeOutOfRange {
            id: t,
            node_count: psi.len(),
        });
    }
    let mut out = psi.clone();
    out.0[t] = -out.0[t];
    Ok(out)
}

fn reflect_into(op: &TransitionOperator, x: &[f64], out: &mut [f64]) -> Result<()> {
    op.matvec_into(x, out)?;
    for (o, &xi) in out.iter_mut().zip(x) {
        *o = 2.0 * *o - xi;
    }
    Ok(())
}

fn ensure_finite(values: &[f64], step: usize) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("amplitudes after step {step}")))
    }
}

/// Runs `cfg.steps` walk steps from an arbitrary initial state.
pub fn evolve_state(
    op: &TransitionOperator,
    psi0: &AmplitudeVector,
    t: usize,
    cfg: &WalkConfig,
) -> Result<AmplitudeVector> {
    cfg.validate()?;
    let n = op.node_count();
    if psi0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: psi0.len(),
        });
    }
    if t >= n {
        return Err(Error::NodeOutOfRange { id: t, node_count: n });
    }
    let mut current = psi0.0.clone();
    let mut next = vec![0.0; n];
    for step in 1..=cfg.steps {
        reflect_into(op, &current, &mut next)?;
        if cfg.oracle {
            next[t] = -next[t];
        }
        ensure_finite(&next, step)?;
        std::mem::swap(&mut current, &mut next);
    }
    Ok(AmplitudeVector(current))
}

/// `psi_k` for a walk started at `j` with the oracle marking `t`.
pub fn evolve(op: &TransitionOperator, j: usize, t: usize, cfg: &WalkConfig) -> Result<AmplitudeVector> {
    let psi0 = init_state(op.node_count(), j)?;
    evolve_state(op, &psi0, t, cfg)
}

/// Link score `|psi_k[t]|^2` by direct simulation.
///
/// Magnitudes are only comparable within a ranking query unless
/// `cfg.normalize` is set.
pub fn score_pair(op: &TransitionOperator, j: usize, t: usize, cfg: &WalkConfig) -> Result<f64> {
    let psi = evolve(op, j, t, cfg)?;
    let amp = psi[t];
    if cfg.normalize {
        let norm = psi.norm_squared();
        Ok(if norm > 0.0 { amp * amp / norm } else { 0.0 })
    } else {
        Ok(amp * amp)
    }
}

/// Scores every pair with [`score_pair`], in parallel.
pub fn score_pairs_naive(op: &TransitionOperator, pairs: &[Pair], cfg: &WalkConfig) -> Result<Vec<f64>> {
    pairs.par_iter().map(|&(j, t)| score_pair(op, j, t, cfg)).collect()
}

/// Scores pairs with the same results as [`score_pair`] but shares work
/// across pairs.
///
/// With `v_m = U v_{m-1} - 2 c_m e_t` and `c_m = (U v_{m-1})[t]`, the
/// oracle trajectory only needs the oracle-free source amplitudes
/// `phi_m[t] = (U^m e_j)[t]` and the return amplitudes `rho_s = (U^s)[t][t]`:
///
/// ```text
/// c_r    = phi_r[t] - 2 * sum_{s=1}^{r-1} c_s rho_{r-s}
/// psi[t] = phi_k[t] - 2 * sum_{r=1}^{k}   c_r rho_{k-r}
/// ```
///
/// Each distinct source is propagated once (k sparse products) and each
/// distinct target once (k-1 products). Normalized scoring needs the full
/// final state and falls back to the direct simulation.
pub fn score_batch(op: &TransitionOperator, pairs: &[Pair], cfg: &WalkConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n = op.node_count();
    for &(j, t) in pairs {
        for id in [j, t] {
            if id >= n {
                return Err(Error::NodeOutOfRange { id, node_count: n });
            }
        }
    }
    if cfg.normalize {
        return score_pairs_naive(op, pairs, cfg);
    }
    let k = cfg.steps;

    // Return amplitudes per distinct target, computed up front and then read-only.
    let returns: HashMap<usize, Vec<f64>> = if cfg.oracle {
        let mut targets: Vec<usize> = pairs.iter().map(|&(_, t)| t).collect();
        targets.sort_unstable();
        targets.dedup();
        let diagonals = targets
            .par_iter()
            .map(|&t| return_amplitudes(op, t, k))
            .collect::<Result<Vec<_>>>()?;
        targets.into_iter().zip(diagonals).collect()
    } else {
        HashMap::new()
    };

    let mut by_source: HashMap<usize, Vec<usize>> = HashMap::new();
    for (idx, &(j, _)) in pairs.iter().enumerate() {
        by_source.entry(j).or_default().push(idx);
    }
    let mut groups: Vec<(usize, Vec<usize>)> = by_source.into_iter().collect();
    groups.sort_unstable_by_key(|(j, _)| *j);

    let scored = groups
        .par_iter()
        .map(|(j, members)| {
            let phi = source_amplitudes(op, *j, members.iter().map(|&i| pairs[i].1), k)?;
            let out = members
                .iter()
                .zip(phi)
                .map(|(&idx, phi_t)| {
                    let t = pairs[idx].1;
                    let amp = if cfg.oracle {
                        oracle_amplitude(&phi_t, &returns[&t])
                    } else {
                        phi_t[k - 1]
                    };
                    let score = amp * amp;
                    if score.is_finite() {
                        Ok((idx, score))
                    } else {
                        Err(Error::NonFinite(format!("score for pair ({j}, {t})")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut scores = vec![0.0; pairs.len()];
    for (idx, s) in scored.into_iter().flatten() {
        scores[idx] = s;
    }
    Ok(scores)
}

/// For each requested target, `[(U e_j)[t], ..., (U^k e_j)[t]]`.
fn source_amplitudes(
    op: &TransitionOperator,
    j: usize,
    targets: impl Iterator<Item = usize> + Clone,
    k: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = op.node_count();
    let mut out: Vec<Vec<f64>> = targets.clone().map(|_| Vec::with_capacity(k)).collect();
    let mut current = vec![0.0; n];
    current[j] = 1.0;
    let mut next = vec![0.0; n];
    for step in 1..=k {
        reflect_into(op, &current, &mut next)?;
        ensure_finite(&next, step)?;
        std::mem::swap(&mut current, &mut next);
        for (slot, t) in out.iter_mut().zip(targets.clone()) {
            slot.push(current[t]);
        }
    }
    Ok(out)
}

/// `[(U^0)[t][t], ..., (U^{k-1})[t][t]]`.
fn return_amplitudes(op: &TransitionOperator, t: usize, k: usize) -> Result<Vec<f64>> {
    let n = op.node_count();
    let mut diag = Vec::with_capacity(k);
    diag.push(1.0);
    let mut current = vec![0.0; n];
    current[t] = 1.0;
    let mut next = vec![0.0; n];
    for step in 1..k {
        reflect_into(op, &current, &mut next)?;
        ensure_finite(&next, step)?;
        std::mem::swap(&mut current, &mut next);
        diag.push(current[t]);
    }
    Ok(diag)
}

/// Target amplitude after the oracle-marked walk, from `phi[m-1] = (U^m e_j)[t]`
/// and `rho[s] = (U^s)[t][t]`.
fn oracle_amplitude(phi: &[f64], rho: &[f64]) -> f64 {
    let k = phi.len();
    let mut c = Vec::with_capacity(k);
    for r in 1..=k {
        let feedback: f64 = (1..r).map(|s| c[s - 1] * rho[r - s]).sum();
        c.push(phi[r - 1] - 2.0 * feedback);
    }
    let feedback: f64 = (1..=k).map(|r| c[r - 1] * rho[k - r]).sum();
    phi[k - 1] - 2.0 * feedback
}

/// Scores pairs in the configured mode.
pub fn score_pairs(op: &TransitionOperator, pairs: &[Pair], cfg: &WalkConfig) -> Result<Vec<f64>> {
    match cfg.mode {
        ScoringMode::Naive => {
            cfg.validate()?;
            score_pairs_naive(op, pairs, cfg)
        }
        ScoringMode::Batched => score_batch(op, pairs, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::operator::build_transition_operator;

    fn edge_op() -> TransitionOperator {
        build_transition_operator(&Graph::from_edges(2, [(0, 1)]).unwrap(), WeightScheme::Uniform)
    }

    #[test]
    fn init_state_one_hot() {
        assert_eq!(init_state(4, 2).unwrap().as_slice(), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(init_state(1, 0).unwrap().as_slice(), &[1.0]);
        assert!(matches!(init_state(3, 3), Err(Error::NodeOutOfRange { id: 3, .. })));
    }

    #[test]
    fn transition_on_single_edge() {
        let op = edge_op();
        let psi = init_state(2, 0).unwrap();
        let out = apply_transition(&op, &psi).unwrap();
        assert_eq!(out.as_slice(), &[-1.0, 2.0]);
        assert_eq!(psi.as_slice(), &[1.0, 0.0]);
        let wrong = AmplitudeVector::from_vec(vec![1.0; 3]);
        assert!(matches!(
            apply_transition(&op, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn transition_scales_eigenvectors() {
        // Path 0-1-2: P has eigenvalue 0 with eigenvector (1, 0, -1)/sqrt(2).
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let op = build_transition_operator(&g, WeightScheme::Uniform);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = AmplitudeVector::from_vec(vec![r, 0.0, -r]);
        let out = apply_transition(&op, &v).unwrap();
        for (a, b) in out.as_slice().iter().zip(v.as_slice()) {
            assert!((a - (-1.0) * b).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_node_reflects_to_minus_itself() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let op = build_transition_operator(&g, WeightScheme::Uniform);
        let out = apply_transition(&op, &init_state(3, 2).unwrap()).unwrap();
        assert_eq!(out.as_slice(), &[0.0, 0.0, -1.0]);
    }

    #[test]
    fn oracle_flips_one_entry() {
        let psi = AmplitudeVector::from_vec(vec![-1.0, 2.0]);
        assert_eq!(apply_oracle(&psi, 1).unwrap().as_slice(), &[-1.0, -2.0]);
        let zero = AmplitudeVector::from_vec(vec![0.5, 0.0, 0.5]);
        let flipped = apply_oracle(&zero, 1).unwrap();
        assert_eq!(flipped, zero);
        let twice = apply_oracle(&apply_oracle(&psi, 0).unwrap(), 0).unwrap();
        assert_eq!(twice, psi);
        assert!(apply_oracle(&psi, 2).is_err());
    }

    #[test]
    fn evolve_single_edge() {
        let op = edge_op();
        let on = evolve(&op, 0, 1, &WalkConfig::with_steps(1)).unwrap();
        assert_eq!(on.as_slice(), &[-1.0, -2.0]);
        let off = evolve(&op, 0, 1, &WalkConfig::with_steps(1).oracle(false)).unwrap();
        assert_eq!(off.as_slice(), &[-1.0, 2.0]);
        assert_eq!(score_pair(&op, 0, 1, &WalkConfig::with_steps(1)).unwrap(), 4.0);
    }

    #[test]
    fn unreachable_target_scores_zero() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let op = build_transition_operator(&g, WeightScheme::Uniform);
        for k in 1..=5 {
            assert_eq!(score_pair(&op, 0, 3, &WalkConfig::with_steps(k)).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_steps_rejected() {
        let op = edge_op();
        assert!(evolve(&op, 0, 1, &WalkConfig::with_steps(0)).is_err());
        assert!(score_batch(&op, &[(0, 1)], &WalkConfig::with_steps(0)).is_err());
    }

    #[test]
    fn batched_k1_is_flipped_one_step_amplitude() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let op = build_transition_operator(&g, WeightScheme::Uniform);
        let cfg = WalkConfig::with_steps(1);
        for t in 0..5 {
            let phi1 = apply_transition(&op, &init_state(5, 0).unwrap()).unwrap()[t];
            let psi = evolve(&op, 0, t, &cfg).unwrap();
            assert_eq!(psi[t], -phi1);
            let batched = score_batch(&op, &[(0, t)], &cfg).unwrap()[0];
            assert!((batched - phi1 * phi1).abs() < 1e-15);
        }
    }

    #[test]
    fn batched_matches_naive_and_repeats() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]).unwrap();
        let op = build_transition_operator(&g, WeightScheme::Uniform);
        let pairs: Vec<Pair> = vec![(0, 3), (0, 3), (2, 5), (3, 3), (4, 1), (0, 1)];
        for k in 1..=6 {
            for oracle in [true, false] {
                let cfg = WalkConfig::with_steps(k).oracle(oracle);
                let batched = score_batch(&op, &pairs, &cfg).unwrap();
                let naive = score_pairs_naive(&op, &pairs, &cfg).unwrap();
                for (b, n) in batched.iter().zip(&naive) {
                    assert!((b - n).abs() <= 1e-10, "k={k} oracle={oracle}: {b} vs {n}");
                }
                assert_eq!(batched[0].to_bits(), batched[1].to_bits());
            }
        }
    }

    #[test]
    fn normalized_score_is_a_probability() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let op = build_transition_operator(&g, WeightScheme::Uniform);
        let cfg = WalkConfig {
            normalize: true,
            ..WalkConfig::with_steps(3)
        };
        let s = score_pair(&op, 0, 3, &cfg).unwrap();
        assert!((0.0..=1.0).contains(&s));
        let batch = score_batch(&op, &[(0, 3)], &cfg).unwrap();
        assert_eq!(batch[0], s);
    }
}
