use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use qwalk_core::catalog::{self, NamedGraph};
use qwalk_core::eval::{
    run_comparison, write_summary_csv, EvalReport, FrozenNegatives, HeuristicScorer, PairScorer, QuantumScorer,
};
use qwalk_core::graph::merge_validation_edges;
use qwalk_core::output::{format_score, score_json, write_score_csv};
use qwalk_core::verify::{default_catalog, verify_catalog, VerifyOptions};
use qwalk_core::walk::score_pairs;
use qwalk_core::{build_transition_operator, Graph, IdMap, Pair, SplitSet, TransitionOperator, WalkConfig};

use crate::config::{CatalogChoice, RunConfig, ScorerSpec};
use crate::data;
use crate::provenance::{write_config_echo, write_file, write_json, Provenance};

fn build_scorer(cfg: &RunConfig, kind: &str, graph: &Graph) -> Result<Box<dyn PairScorer>> {
    Ok(match cfg.scorer_spec(kind)? {
        ScorerSpec::Quantum(wc) => Box::new(QuantumScorer::new(graph, wc)?),
        ScorerSpec::Heuristic(h) => Box::new(HeuristicScorer::new(graph.clone(), h)?),
    })
}

fn edge_list_text(prov: &Provenance, pairs: &[Pair]) -> String {
    let mut text = format!("# {}\n", prov.comment());
    for (u, v) in pairs {
        text.push_str(&format!("{u} {v}\n"));
    }
    text
}

#[derive(Serialize)]
struct SplitSizes {
    train: usize,
    valid: usize,
    test: usize,
}

#[derive(Serialize)]
struct IngestManifest {
    node_count: usize,
    edge_count: usize,
    isolated_nodes: usize,
    relabeled: bool,
    splits: Option<SplitSizes>,
}

pub fn ingest(cfg: &RunConfig, split: Option<Vec<f64>>) -> Result<ExitCode> {
    let edges = cfg
        .data
        .edges
        .as_ref()
        .context("no edge list given (--edges or data.edges)")?;
    let (graph, map) = data::load_graph(edges, &cfg.data)?;
    let prov = Provenance::new(cfg)?;
    let dir = &cfg.output_dir;

    let mut bin = Vec::new();
    graph.write_binary(&mut bin)?;
    write_file(&dir.join("graph.qwg"), &bin)?;
    if let Some(map) = &map {
        let mut text = Vec::new();
        map.write(&mut text)?;
        write_file(&dir.join("id_map.txt"), &text)?;
    }
    let sizes = match split {
        Some(r) => {
            if r.len() != 3 {
                bail!("--split takes three ratios (train,valid,test), got {}", r.len());
            }
            let splits = SplitSet::random(&graph, [r[0], r[1], r[2]], cfg.seed)?;
            for (name, pairs) in [
                ("train", &splits.train),
                ("valid", &splits.valid),
                ("test", &splits.test),
            ] {
                write_file(
                    &dir.join(format!("{name}.txt")),
                    edge_list_text(&prov, pairs).as_bytes(),
                )?;
            }
            Some(SplitSizes {
                train: splits.train.len(),
                valid: splits.valid.len(),
                test: splits.test.len(),
            })
        }
        None => None,
    };
    let manifest = IngestManifest {
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        isolated_nodes: graph.degrees().iter().filter(|&&d| d == 0).count(),
        relabeled: map.is_some(),
        splits: sizes,
    };
    write_json(&dir.join("ingest.json"), &prov, &manifest)?;
    println!(
        "{} nodes, {} edges -> {}",
        manifest.node_count,
        manifest.edge_count,
        dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn display_id(u: usize, map: Option<&IdMap>, one_indexed: bool) -> usize {
    let id = map.and_then(|m| m.original(u)).map_or(u, |o| o as usize);
    if one_indexed {
        id + 1
    } else {
        id
    }
}

pub fn score(
    cfg: &RunConfig,
    pairs_file: Option<&Path>,
    pair_args: &[String],
    json: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let path = cfg
        .data
        .edges
        .as_ref()
        .or(cfg.data.train.as_ref())
        .context("no graph given (--edges or data.edges)")?;
    let (graph, map) = data::load_graph(path, &cfg.data)?;
    let mut pairs = Vec::new();
    if let Some(p) = pairs_file {
        pairs.extend(data::load_pairs(p, &cfg.data, map.as_ref())?);
    }
    for s in pair_args {
        let raw = data::shift_pair(data::parse_pair(s)?, &cfg.data)?;
        pairs.extend(data::pairs_from_raw(&[raw], map.as_ref())?);
    }
    if pairs.is_empty() {
        bail!("no pairs to score (--pairs FILE or --pair u,v)");
    }
    for &(u, v) in &pairs {
        graph.check_node(u)?;
        graph.check_node(v)?;
    }
    let scorer = build_scorer(cfg, &cfg.scorer.kind, &graph)?;
    let scores = scorer.score_pairs(&pairs)?;
    let shown: Vec<Pair> = pairs
        .iter()
        .map(|&(u, v)| {
            (
                display_id(u, map.as_ref(), cfg.data.one_indexed),
                display_id(v, map.as_ref(), cfg.data.one_indexed),
            )
        })
        .collect();
    let prov = Provenance::new(cfg)?;
    let mut buf = Vec::new();
    if json {
        let meta = serde_json::json!({ "provenance": prov, "scorer": scorer.id() });
        let value = score_json(&shown, &scores, meta)?;
        buf.extend(serde_json::to_string_pretty(&value)?.as_bytes());
        buf.push(b'\n');
    } else {
        write_score_csv(
            &shown,
            &scores,
            &[prov.comment(), format!("scorer={}", scorer.id())],
            &mut buf,
        )?;
    }
    match out {
        Some(p) => write_file(p, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(ExitCode::SUCCESS)
}

struct Prepared {
    splits: SplitSet,
    scoring: Graph,
    map: Option<IdMap>,
}

fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let sd = data::load_splits(&cfg.data)?;
    let train = sd.splits.train_graph(sd.node_count)?;
    let scoring = if cfg.data.merge_validation {
        merge_validation_edges(&train, &sd.splits)?
    } else {
        train
    };
    Ok(Prepared {
        splits: sd.splits,
        scoring,
        map: sd.map,
    })
}

fn write_common(dir: &Path, prov: &Provenance, cfg: &RunConfig, map: Option<&IdMap>) -> Result<()> {
    write_config_echo(dir, prov, cfg)?;
    if let Some(map) = map {
        let mut text = Vec::new();
        map.write(&mut text)?;
        write_file(&dir.join("id_map.txt"), &text)?;
    }
    Ok(())
}

fn write_negatives(dir: &Path, prov: &Provenance, negatives: &FrozenNegatives) -> Result<()> {
    let mut text = format!("# {}\n", prov.comment()).into_bytes();
    negatives.write_csv(&mut text)?;
    write_file(&dir.join("negatives.csv"), &text)
}

fn slug(kind: &str) -> String {
    kind.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '-'
            }
        })
        .collect()
}

fn summary_text(prov: &Provenance, reports: &[EvalReport]) -> Result<String> {
    let mut buf = format!("# {}\n", prov.comment()).into_bytes();
    write_summary_csv(reports, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

pub fn eval(cfg: &RunConfig) -> Result<ExitCode> {
    let prep = prepare(cfg)?;
    let prov = Provenance::new(cfg)?;
    let kinds: Vec<String> = std::iter::once(cfg.scorer.kind.clone())
        .chain(cfg.eval.compare.iter().cloned())
        .collect();
    let scorers = kinds
        .iter()
        .map(|k| build_scorer(cfg, k, &prep.scoring))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&dyn PairScorer> = scorers.iter().map(|s| s.as_ref()).collect();
    let policy = cfg.negative_policy();
    let (negatives, reports) = run_comparison(&prep.scoring, &prep.splits, &refs, &policy, &cfg.eval_config())?;

    let dir = &cfg.output_dir;
    write_common(dir, &prov, cfg, prep.map.as_ref())?;
    write_negatives(dir, &prov, &negatives)?;
    for (i, (kind, report)) in kinds.iter().zip(&reports).enumerate() {
        write_json(&dir.join(format!("report-{i}-{}.json", slug(kind))), &prov, report)?;
    }
    let summary = summary_text(&prov, &reports)?;
    write_file(&dir.join("summary.csv"), summary.as_bytes())?;
    print!("{summary}");
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct AblationRow {
    k: usize,
    oracle: bool,
    mrr: f64,
    hits: BTreeMap<usize, f64>,
}

#[derive(Debug, Serialize)]
struct AmplitudeRow {
    u: usize,
    a: usize,
    k: usize,
    prob_oracle: f64,
    prob_no_oracle: f64,
}

#[derive(Debug, Serialize)]
struct AblationReport<'a> {
    split: qwalk_core::eval::EvalSplit,
    policy: &'a qwalk_core::eval::NegativePolicy,
    negatives_sha256: String,
    rows: Vec<AblationRow>,
    /// Row with the highest MRR, earliest on ties.
    best: Option<(usize, bool)>,
    /// Largest `prob_oracle / prob_no_oracle` over traced pairs and depths.
    max_oracle_gain: Option<f64>,
    /// Largest `prob_oracle / prob_no_oracle` at the configured depth.
    max_oracle_gain_at_configured_k: Option<f64>,
}

fn amplitude_rows(
    op: &TransitionOperator,
    base: &WalkConfig,
    pairs: &[Pair],
    ks: &[usize],
) -> Result<Vec<AmplitudeRow>> {
    let mut rows = Vec::new();
    for &k in ks {
        let on = score_pairs(
            op,
            pairs,
            &WalkConfig {
                steps: k,
                oracle: true,
                ..*base
            },
        )?;
        let off = score_pairs(
            op,
            pairs,
            &WalkConfig {
                steps: k,
                oracle: false,
                ..*base
            },
        )?;
        for (i, &(u, a)) in pairs.iter().enumerate() {
            rows.push(AmplitudeRow {
                u,
                a,
                k,
                prob_oracle: on[i],
                prob_no_oracle: off[i],
            });
        }
    }
    Ok(rows)
}

fn gain(rows: &[&AmplitudeRow]) -> Option<f64> {
    rows.iter()
        .filter(|r| r.prob_oracle > 0.0)
        .map(|r| r.prob_oracle / r.prob_no_oracle)
        .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |m| m.max(g))))
}

pub fn ablate(cfg: &RunConfig) -> Result<ExitCode> {
    let prep = prepare(cfg)?;
    let prov = Provenance::new(cfg)?;
    let base = cfg.walk_config()?;
    let ks: Vec<usize> = (cfg.ablate.k_min..=cfg.ablate.k_max).collect();
    let grid: Vec<(usize, bool)> = ks
        .iter()
        .flat_map(|&k| cfg.ablate.oracle_modes.iter().map(move |&o| (k, o)))
        .collect();
    let op = build_transition_operator(&prep.scoring, base.scheme);
    let scorers = grid
        .iter()
        .map(|&(k, oracle)| {
            QuantumScorer::from_operator(
                op.clone(),
                WalkConfig {
                    steps: k,
                    oracle,
                    ..base
                },
            )
        })
        .collect::<qwalk_core::Result<Vec<_>>>()?;
    let refs: Vec<&dyn PairScorer> = scorers.iter().map(|s| s as &dyn PairScorer).collect();
    let policy = cfg.negative_policy();
    let ecfg = cfg.eval_config();
    let (negatives, reports) = run_comparison(&prep.scoring, &prep.splits, &refs, &policy, &ecfg)?;

    let rows: Vec<AblationRow> = grid
        .iter()
        .zip(&reports)
        .map(|(&(k, oracle), r)| AblationRow {
            k,
            oracle,
            mrr: r.metrics.mrr,
            hits: r.metrics.hits.clone(),
        })
        .collect();
    let best = rows
        .iter()
        .fold(None::<&AblationRow>, |acc, r| match acc {
            Some(b) if b.mrr >= r.mrr => Some(b),
            _ => Some(r),
        })
        .map(|r| (r.k, r.oracle));

    let positives = qwalk_core::eval::positives_for(&prep.splits, &ecfg);
    let traced = &positives[..positives.len().min(cfg.ablate.amplitude_pairs)];
    let amps = amplitude_rows(&op, &base, traced, &ks)?;
    let all: Vec<&AmplitudeRow> = amps.iter().collect();
    let at_k: Vec<&AmplitudeRow> = amps.iter().filter(|r| r.k == base.steps).collect();

    let dir = &cfg.output_dir;
    write_common(dir, &prov, cfg, prep.map.as_ref())?;
    write_negatives(dir, &prov, &negatives)?;
    let mut csv = format!("# {}\nk,oracle,mrr", prov.comment());
    for k in &ecfg.hits_ks {
        csv.push_str(&format!(",hits@{k}"));
    }
    csv.push('\n');
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{}",
            r.k,
            if r.oracle { "on" } else { "off" },
            format_score(r.mrr)
        ));
        for h in r.hits.values() {
            csv.push_str(&format!(",{}", format_score(*h)));
        }
        csv.push('\n');
    }
    write_file(&dir.join("ablation.csv"), csv.as_bytes())?;

    let mut amp_csv = format!("# {}\nu,a,k,prob_oracle,prob_no_oracle\n", prov.comment());
    for r in &amps {
        amp_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.u,
            r.a,
            r.k,
            format_score(r.prob_oracle),
            format_score(r.prob_no_oracle)
        ));
    }
    write_file(&dir.join("amplitudes.csv"), amp_csv.as_bytes())?;

    let report = AblationReport {
        split: ecfg.split,
        policy: &policy,
        negatives_sha256: negatives.digest(),
        best,
        max_oracle_gain: gain(&all),
        max_oracle_gain_at_configured_k: gain(&at_k),
        rows,
    };
    write_json(&dir.join("ablation.json"), &prov, &report)?;
    print!("{csv}");
    if let Some((k, oracle)) = report.best {
        println!("# best: k={k} oracle={}", if oracle { "on" } else { "off" });
    }
    Ok(ExitCode::SUCCESS)
}

fn tamper(op: &mut TransitionOperator) -> qwalk_core::Result<()> {
    for i in 0..op.node_count() {
        let first = op.row(i).next().map(|(j, _)| j);
        if let Some(j) = first {
            return op.perturb_entry(i, j, 1e-3);
        }
    }
    Ok(())
}

pub fn verify(cfg: &RunConfig, extra: Option<&Path>, out: Option<&Path>, corrupt: bool) -> Result<ExitCode> {
    let mut graphs = match cfg.verify.catalog {
        CatalogChoice::Default => default_catalog(),
        CatalogChoice::Regular => catalog::regular_catalog(),
        CatalogChoice::All => {
            let mut g = default_catalog();
            g.extend(catalog::regular_catalog());
            g
        }
    };
    if let Some(p) = extra {
        let (graph, _) = data::load_graph(p, &cfg.data)?;
        graphs.push(NamedGraph {
            name: p.display().to_string(),
            graph,
        });
    }
    let opts = VerifyOptions {
        max_steps: cfg.verify.max_steps,
        schemes: cfg.verify.schemes.clone(),
        ..VerifyOptions::default()
    };
    let hook: &dyn Fn(&mut TransitionOperator) -> qwalk_core::Result<()> = &tamper;
    let report = verify_catalog(&graphs, &opts, corrupt.then_some(hook))?;
    let prov = Provenance::new(cfg)?;
    let path = out.map_or_else(|| cfg.output_dir.join("verify.json"), Path::to_path_buf);
    write_json(&path, &prov, &report)?;

    let fmt_opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3e}"));
    for r in &report.records {
        println!(
            "{} {:<28} {:<18} gap={:<10} path_sum={:<10} identity={:.3e} bound_ok={}",
            if r.passed { "ok  " } else { "FAIL" },
            r.graph,
            r.scheme.to_string(),
            fmt_opt(r.gap),
            fmt_opt(r.path_sum_max_residual),
            r.identity_max_residual,
            r.bound_assumption_ok
        );
    }
    let failed = report.records.iter().filter(|r| !r.passed).count();
    println!(
        "{} of {} checks passed; report at {}",
        report.records.len() - failed,
        report.records.len(),
        path.display()
    );
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
