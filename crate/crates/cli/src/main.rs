//! `qwalk`: ingest graphs, score pairs, run ranking evaluations, sweep walk
//! depth with and without the oracle, and verify the walk on a graph catalog.

mod commands;
mod config;
mod data;
mod provenance;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qwalk_core::eval::{EvalSplit, TiePolicy};
use qwalk_core::{ScoringMode, WeightScheme};

use config::{CatalogChoice, PolicyKind, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Quantum-walk link prediction toolkit")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (else QWALK_THREADS, else the config, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an edge list into a binary container, optionally splitting edges.
    Ingest(IngestArgs),
    /// Score node pairs with the walk or a heuristic.
    Score(ScoreArgs),
    /// Rank held-out edges against frozen negatives.
    Eval(EvalArgs),
    /// Sweep walk depth with the oracle on and off.
    Ablate(AblateArgs),
    /// Check path sums, the two-step identity and spectra on a graph catalog.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
struct DataArgs {
    /// Edge list or binary container.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    valid: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    /// Input ids start at 1.
    #[arg(long)]
    one_indexed: bool,
    /// Relabel arbitrary ids densely in order of appearance.
    #[arg(long)]
    relabel: bool,
    /// Score test edges on train plus validation edges.
    #[arg(long)]
    merge_validation: bool,
    /// Dataset profile (cora, citeseer, pubmed, collab, ddi) choosing the default k.
    #[arg(long)]
    dataset: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Args)]
struct ScorerArgs {
    /// quantum, cn, aa, ra, katz or sp.
    #[arg(long)]
    scorer: Option<String>,
    /// Walk steps.
    #[arg(short = 'k', long = "steps")]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    oracle: Option<OnOff>,
    /// uniform, inverse-degree or inverse-log-degree.
    #[arg(long)]
    scheme: Option<WeightScheme>,
    /// Divide the target probability by the state norm.
    #[arg(long)]
    normalize: bool,
    /// batched or naive.
    #[arg(long)]
    mode: Option<ScoringMode>,
}

#[derive(Debug, Clone, Args)]
struct PolicyArgs {
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    count_per_side: Option<usize>,
    #[arg(long)]
    negative_seed: Option<u64>,
    /// average, optimistic or pessimistic.
    #[arg(long)]
    ties: Option<TiePolicy>,
    #[arg(long, value_enum)]
    split: Option<SplitArg>,
    /// Hits@K cutoffs, comma separated.
    #[arg(long, value_delimiter = ',')]
    hits: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Uniform,
    Corruption,
    Hard,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SplitArg {
    Valid,
    Test,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// train,valid,test ratios, e.g. 0.85,0.05,0.10.
    #[arg(long, value_delimiter = ',')]
    split: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    scorer: ScorerArgs,
    /// File of pairs to score, one per line.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// A single pair `u,v`; repeatable.
    #[arg(long = "pair")]
    pair: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    scorer: ScorerArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Additional scorers sharing the frozen negatives; repeatable.
    #[arg(long)]
    compare: Vec<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AblateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    scorer: ScorerArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Positives traced in the amplitude table.
    #[arg(long)]
    amplitude_pairs: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    catalog: Option<CatalogArg>,
    /// Extra graph to verify alongside the catalog.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<WeightScheme>>,
    /// Report path; defaults to verify.json in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Perturb every operator before checking (exercises the failure path).
    #[arg(long, hide = true)]
    corrupt_operator: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CatalogArg {
    Default,
    Regular,
    All,
}

fn apply_data(cfg: &mut RunConfig, a: &DataArgs) {
    let d = &mut cfg.data;
    if a.edges.is_some() {
        d.edges = a.edges.clone();
    }
    if a.train.is_some() {
        d.train = a.train.clone();
    }
    if a.valid.is_some() {
        d.valid = a.valid.clone();
    }
    if a.test.is_some() {
        d.test = a.test.clone();
    }
    d.one_indexed |= a.one_indexed;
    d.relabel |= a.relabel;
    d.merge_validation |= a.merge_validation;
    if a.dataset.is_some() {
        cfg.dataset = a.dataset.clone();
    }
}

fn apply_scorer(cfg: &mut RunConfig, a: &ScorerArgs) {
    let s = &mut cfg.scorer;
    if let Some(kind) = &a.scorer {
        s.kind = kind.clone();
    }
    if a.steps.is_some() {
        s.steps = a.steps;
    }
    if let Some(o) = a.oracle {
        s.oracle = matches!(o, OnOff::On);
    }
    if let Some(scheme) = a.scheme {
        s.scheme = scheme;
    }
    s.normalize |= a.normalize;
    if let Some(mode) = a.mode {
        s.mode = mode;
    }
}

fn apply_policy(cfg: &mut RunConfig, a: &PolicyArgs) {
    let n = &mut cfg.negatives;
    if let Some(p) = a.policy {
        n.policy = match p {
            PolicyArg::Uniform => PolicyKind::Uniform,
            PolicyArg::Corruption => PolicyKind::Corruption,
            PolicyArg::Hard => PolicyKind::Hard,
        };
    }
    if let Some(c) = a.count {
        n.count = c;
    }
    if a.count_per_side.is_some() {
        n.count_per_side = a.count_per_side;
    }
    if a.negative_seed.is_some() {
        n.seed = a.negative_seed;
    }
    if let Some(t) = a.ties {
        cfg.eval.tie_policy = t;
    }
    if let Some(s) = a.split {
        cfg.eval.split = match s {
            SplitArg::Valid => EvalSplit::Valid,
            SplitArg::Test => EvalSplit::Test,
        };
    }
    if let Some(h) = &a.hits {
        cfg.eval.hits = h.clone();
    }
}

fn thread_count(cli: &Cli, cfg: &RunConfig) -> Result<Option<usize>> {
    if cli.threads.is_some() {
        return Ok(cli.threads);
    }
    if let Ok(v) = std::env::var("QWALK_THREADS") {
        let n = v
            .trim()
            .parse::<usize>()
            .with_context(|| format!("QWALK_THREADS={v:?} is not a thread count"))?;
        return Ok(Some(n));
    }
    Ok(cfg.threads)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Ingest(a) => {
            apply_data(&mut cfg, &a.data);
            if let Some(d) = &a.out_dir {
                cfg.output_dir = d.clone();
            }
        }
        Command::Score(a) => {
            apply_data(&mut cfg, &a.data);
            apply_scorer(&mut cfg, &a.scorer);
        }
        Command::Eval(a) => {
            apply_data(&mut cfg, &a.data);
            apply_scorer(&mut cfg, &a.scorer);
            apply_policy(&mut cfg, &a.policy);
            if !a.compare.is_empty() {
                cfg.eval.compare = a.compare.clone();
            }
            if let Some(d) = &a.out_dir {
                cfg.output_dir = d.clone();
            }
        }
        Command::Ablate(a) => {
            apply_data(&mut cfg, &a.data);
            apply_scorer(&mut cfg, &a.scorer);
            apply_policy(&mut cfg, &a.policy);
            if let Some(k) = a.k_min {
                cfg.ablate.k_min = k;
            }
            if let Some(k) = a.k_max {
                cfg.ablate.k_max = k;
            }
            if let Some(n) = a.amplitude_pairs {
                cfg.ablate.amplitude_pairs = n;
            }
            if let Some(d) = &a.out_dir {
                cfg.output_dir = d.clone();
            }
        }
        Command::Verify(a) => {
            if let Some(c) = a.catalog {
                cfg.verify.catalog = match c {
                    CatalogArg::Default => CatalogChoice::Default,
                    CatalogArg::Regular => CatalogChoice::Regular,
                    CatalogArg::All => CatalogChoice::All,
                };
            }
            if let Some(k) = a.max_steps {
                cfg.verify.max_steps = k;
            }
            if let Some(s) = &a.schemes {
                cfg.verify.schemes = s.clone();
            }
        }
    }
    cfg.validate()?;
    if let Some(n) = thread_count(&cli, &cfg)? {
        anyhow::ensure!(n > 0, "thread count must be positive");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }

    match cli.command {
        Command::Ingest(a) => commands::ingest(&cfg, a.split),
        Command::Score(a) => commands::score(
            &cfg,
            a.pairs.as_deref(),
            &a.pair,
            matches!(a.format, Format::Json),
            a.out.as_deref(),
        ),
        Command::Eval(_) => commands::eval(&cfg),
        Command::Ablate(_) => commands::ablate(&cfg),
        Command::Verify(a) => commands::verify(&cfg, a.graph.as_deref(), a.out.as_deref(), a.corrupt_operator),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
