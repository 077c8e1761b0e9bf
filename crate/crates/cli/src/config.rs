use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qwalk_core::eval::{EvalConfig, EvalSplit, HeuristicMix, NegativePolicy, TiePolicy};
use qwalk_core::walk::MAX_STEPS;
use qwalk_core::{HeuristicKind, ScoringMode, WalkConfig, WeightScheme};

/// Default walk depth per named dataset profile.
pub fn profile_steps(dataset: &str) -> Option<usize> {
    match dataset.to_ascii_lowercase().as_str() {
        "cora" => Some(2),
        "citeseer" => Some(4),
        "pubmed" => Some(3),
        "collab" | "ogbl-collab" => Some(2),
        "ddi" | "ogbl-ddi" => Some(2),
        _ => None,
    }
}

pub const FALLBACK_STEPS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<String>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub output_dir: PathBuf,
    pub data: DataConfig,
    pub scorer: ScorerConfig,
    pub negatives: NegativesConfig,
    pub eval: EvalSection,
    pub ablate: AblateSection,
    pub verify: VerifySection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            seed: 0,
            threads: None,
            output_dir: PathBuf::from("qwalk-out"),
            data: DataConfig::default(),
            scorer: ScorerConfig::default(),
            negatives: NegativesConfig::default(),
            eval: EvalSection::default(),
            ablate: AblateSection::default(),
            verify: VerifySection::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub edges: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub valid: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub one_indexed: bool,
    pub relabel: bool,
    /// Score the test split on train plus validation edges.
    pub merge_validation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScorerConfig {
    /// `quantum` or a heuristic: cn, aa, ra, katz, sp.
    pub kind: String,
    /// Walk depth; the dataset profile decides when unset.
    pub steps: Option<usize>,
    pub oracle: bool,
    pub scheme: WeightScheme,
    pub normalize: bool,
    pub mode: ScoringMode,
    pub katz_beta: f64,
    pub katz_max_len: usize,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        Self {
            kind: "quantum".into(),
            steps: None,
            oracle: true,
            scheme: WeightScheme::Uniform,
            normalize: false,
            mode: ScoringMode::Batched,
            katz_beta: qwalk_core::heuristics::DEFAULT_KATZ_BETA,
            katz_max_len: qwalk_core::heuristics::DEFAULT_KATZ_MAX_LEN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Uniform,
    Corruption,
    Hard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NegativesConfig {
    pub policy: PolicyKind,
    /// Negatives per query for `uniform` and `hard`.
    pub count: usize,
    /// Per-side cap for `corruption`; unset takes the full corruption set.
    pub count_per_side: Option<usize>,
    /// Defaults to the run seed.
    pub seed: Option<u64>,
    pub cn_weight: f64,
    pub shortest_path_weight: f64,
}

impl Default for NegativesConfig {
    fn default() -> Self {
        let mix = HeuristicMix::default();
        Self {
            policy: PolicyKind::Uniform,
            count: 1000,
            count_per_side: None,
            seed: None,
            cn_weight: mix.cn_weight,
            shortest_path_weight: mix.shortest_path_weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub hits: Vec<usize>,
    pub tie_policy: TiePolicy,
    pub split: EvalSplit,
    /// Extra scorers ranked against the same frozen negatives.
    pub compare: Vec<String>,
}

impl Default for EvalSection {
    fn default() -> Self {
        let base = EvalConfig::default();
        Self {
            hits: base.hits_ks,
            tie_policy: base.tie_policy,
            split: base.split,
            compare: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblateSection {
    pub k_min: usize,
    pub k_max: usize,
    pub oracle_modes: Vec<bool>,
    /// Positives whose target probabilities are traced with and without the oracle.
    pub amplitude_pairs: usize,
}

impl Default for AblateSection {
    fn default() -> Self {
        Self {
            k_min: 1,
            k_max: 10,
            oracle_modes: vec![true, false],
            amplitude_pairs: 25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogChoice {
    Default,
    Regular,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub catalog: CatalogChoice,
    pub max_steps: usize,
    pub schemes: Vec<WeightScheme>,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            catalog: CatalogChoice::Default,
            max_steps: 4,
            schemes: WeightScheme::ALL.to_vec(),
        }
    }
}

/// A scorer named on the command line or in the config.
#[derive(Debug, Clone, PartialEq)]
pub enum ScorerSpec {
    Quantum(WalkConfig),
    Heuristic(HeuristicKind),
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// SHA-256 of the resolved configuration rendered as TOML.
    pub fn sha256(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Walk depth from the scorer section or the dataset profile.
    pub fn steps(&self) -> usize {
        if let Some(k) = self.scorer.steps {
            return k;
        }
        match self.dataset.as_deref() {
            Some(name) => profile_steps(name).unwrap_or_else(|| {
                eprintln!("warning: no profile for dataset {name:?}; using k={FALLBACK_STEPS}");
                FALLBACK_STEPS
            }),
            None => FALLBACK_STEPS,
        }
    }

    pub fn walk_config(&self) -> Result<WalkConfig> {
        let cfg = WalkConfig {
            steps: self.steps(),
            oracle: self.scorer.oracle,
            scheme: self.scorer.scheme,
            mode: self.scorer.mode,
            normalize: self.scorer.normalize,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn scorer_spec(&self, kind: &str) -> Result<ScorerSpec> {
        if kind == "quantum" {
            return Ok(ScorerSpec::Quantum(self.walk_config()?));
        }
        let parsed: HeuristicKind = kind.parse()?;
        let parsed = match parsed {
            HeuristicKind::Katz { .. } => HeuristicKind::Katz {
                beta: self.scorer.katz_beta,
                max_len: self.scorer.katz_max_len,
            },
            other => other,
        };
        parsed.validate()?;
        Ok(ScorerSpec::Heuristic(parsed))
    }

    pub fn negative_policy(&self) -> NegativePolicy {
        let seed = self.negatives.seed.unwrap_or(self.seed);
        match self.negatives.policy {
            PolicyKind::Uniform => NegativePolicy::Uniform {
                count: self.negatives.count,
                seed,
            },
            PolicyKind::Corruption => NegativePolicy::Corruption {
                count_per_side: self.negatives.count_per_side,
                seed,
            },
            PolicyKind::Hard => NegativePolicy::Hard {
                count: self.negatives.count,
                seed,
                mix: HeuristicMix {
                    cn_weight: self.negatives.cn_weight,
                    shortest_path_weight: self.negatives.shortest_path_weight,
                },
            },
        }
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            hits_ks: self.eval.hits.clone(),
            tie_policy: self.eval.tie_policy,
            split: self.eval.split,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.scorer.steps {
            if !(1..=MAX_STEPS).contains(&k) {
                bail!("scorer.steps must lie in [1, {MAX_STEPS}], got {k}");
            }
        }
        let a = &self.ablate;
        if a.k_min == 0 || a.k_min > a.k_max || a.k_max > MAX_STEPS {
            bail!("ablate k range {}..={} must lie in [1, {MAX_STEPS}]", a.k_min, a.k_max);
        }
        if a.oracle_modes.is_empty() {
            bail!("ablate.oracle_modes is empty");
        }
        if self.eval.hits.contains(&0) {
            bail!("eval.hits entries must be positive");
        }
        if self.threads == Some(0) {
            bail!("threads must be positive");
        }
        Ok(())
    }
}
