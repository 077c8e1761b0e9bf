use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qwalk_core::catalog;
use qwalk_core::graph::SplitSet;
use sha2::{Digest, Sha256};

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .env_remove("QWALK_THREADS")
        .output()
        .expect("qwalk runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

struct Fixture {
    _tmp: tempfile::TempDir,
    root: PathBuf,
}

impl Fixture {
    fn new() -> Self {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().to_path_buf();
        Self { _tmp: tmp, root }
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.root.join(name);
        std::fs::write(&p, text).unwrap();
        s(&p)
    }

    fn path(&self, name: &str) -> String {
        s(&self.root.join(name))
    }

    /// Planted-partition train/valid/test files.
    fn splits(&self) -> [String; 3] {
        let g = catalog::planted_partition(3, 20, 0.35, 0.03, 5);
        let split = SplitSet::random(&g, [0.8, 0.1, 0.1], 2).unwrap();
        let dump = |name: &str, pairs: &[(usize, usize)]| {
            let text: String = pairs.iter().map(|(u, v)| format!("{u}\t{v}\n")).collect();
            self.write(name, &text)
        };
        [
            dump("train.txt", &split.train),
            dump("valid.txt", &split.valid),
            dump("test.txt", &split.test),
        ]
    }
}

#[test]
fn missing_input_exits_with_usage_code_and_names_the_path() {
    let f = Fixture::new();
    let missing = f.path("nope.txt");
    let o = qwalk(&["score", "--edges", &missing, "--pair", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(&missing), "{}", stderr(&o));
}

#[test]
fn bad_flag_exits_with_usage_code() {
    let o = qwalk(&["score", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_rejected() {
    let f = Fixture::new();
    let cfg = f.write("c.toml", "seed = 1\nbogus = 3\n");
    let edges = f.write("e.txt", "0 1\n");
    let o = qwalk(&["--config", &cfg, "score", "--edges", &edges, "--pair", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));
}

#[test]
fn single_edge_score_golden() {
    let f = Fixture::new();
    let edges = f.write("e.txt", "0 1\n");
    let o = qwalk(&["score", "--edges", &edges, "--pair", "0,1", "-k", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# qwalk 0.1.0 config_sha256="), "{head}");
    assert!(out.contains("source,target,score"));
    assert!(out.contains("0,1,4.0000000000000000e0"), "{out}");
}

#[test]
fn heuristic_json_output_carries_provenance() {
    let f = Fixture::new();
    let edges = f.write("e.txt", "0 1\n1 2\n");
    let out = f.path("s.json");
    let o = qwalk(&[
        "--seed", "9", "score", "--edges", &edges, "--pair", "0,2", "--scorer", "ra", "--format", "json", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["scores"]["0,2"].as_f64(), Some(0.5));
    let prov = &v["meta"]["provenance"];
    assert_eq!(prov["tool"], "qwalk");
    assert_eq!(prov["seed"], 9);
    assert_eq!(prov["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn one_indexed_scores_report_original_ids() {
    let f = Fixture::new();
    let edges = f.write("e.txt", "1 2\n2 3\n");
    let o = qwalk(&[
        "score",
        "--edges",
        &edges,
        "--one-indexed",
        "--pair",
        "1,3",
        "--scorer",
        "cn",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("1,3,1.0000000000000000e0"), "{}", stdout(&o));
}

#[test]
fn eval_is_reproducible_and_shares_negatives() {
    let f = Fixture::new();
    let [train, valid, test] = f.splits();
    let run = |dir: &str| {
        let out = f.path(dir);
        let o = qwalk(&[
            "eval",
            "--train",
            &train,
            "--valid",
            &valid,
            "--test",
            &test,
            "--compare",
            "cn",
            "--compare",
            "ra",
            "--count",
            "40",
            "--out-dir",
            &out,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let a = run("a");
    let reports: Vec<serde_json::Value> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("report-"))
        .map(|p| serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect();
    assert_eq!(reports.len(), 3);
    let digest = &reports[0]["negatives_sha256"];
    assert!(reports.iter().all(|r| &r["negatives_sha256"] == digest));
    assert!(reports.iter().all(|r| r["provenance"]["tool"] == "qwalk"));

    let summary = std::fs::read_to_string(Path::new(&a).join("summary.csv")).unwrap();
    assert!(summary.starts_with("# qwalk"));
    assert_eq!(summary.lines().count(), 1 + 1 + 3);
    let config = std::fs::read_to_string(Path::new(&a).join("config.toml")).unwrap();
    assert!(config.contains("[negatives]"));

    let negatives = std::fs::read(Path::new(&a).join("negatives.csv")).unwrap();
    let body = &negatives[negatives.iter().position(|&b| b == b'\n').unwrap() + 1..];
    let hex: String = Sha256::digest(body).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(digest.as_str(), Some(hex.as_str()));
    let out_a = std::fs::read(Path::new(&a).join("summary.csv")).unwrap();
    std::fs::rename(&a, f.path("keep")).unwrap();
    let again = run("a");
    assert_eq!(
        std::fs::read(Path::new(&again).join("negatives.csv")).unwrap(),
        negatives
    );
    assert_eq!(std::fs::read(Path::new(&again).join("summary.csv")).unwrap(), out_a);
}

#[test]
fn eval_rejects_leaky_splits() {
    let f = Fixture::new();
    let train = f.write("train.txt", "0 1\n1 2\n2 3\n");
    let test = f.write("test.txt", "1 2\n");
    let o = qwalk(&["eval", "--train", &train, "--test", &test, "--out-dir", &f.path("o")]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn ablation_covers_the_grid() {
    let f = Fixture::new();
    let [train, valid, test] = f.splits();
    let out = f.path("abl");
    let o = qwalk(&[
        "ablate",
        "--train",
        &train,
        "--valid",
        &valid,
        "--test",
        &test,
        "--k-min",
        "1",
        "--k-max",
        "4",
        "--count",
        "30",
        "--out-dir",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(Path::new(&out).join("ablation.csv")).unwrap();
    let rows = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, 2 * 4);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(&out).join("ablation.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 8);
    assert!(Path::new(&out).join("amplitudes.csv").exists());
    assert!(Path::new(&out).join("negatives.csv").exists());
}

#[test]
fn verify_passes_and_detects_corruption() {
    let f = Fixture::new();
    let good = f.path("v.json");
    let o = qwalk(&["verify", "--out", &good]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    assert_eq!(v["passed"], true);

    let bad = f.path("bad.json");
    let o = qwalk(&["verify", "--corrupt-operator", "--out", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&bad).unwrap()).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn ingest_writes_container_and_splits() {
    let f = Fixture::new();
    let g = catalog::planted_partition(2, 15, 0.5, 0.05, 1);
    let text: String = g.edges().map(|(u, v)| format!("{} {}\n", u + 100, v + 100)).collect();
    let edges = f.write("raw.txt", &text);
    let out = f.path("ing");
    let o = qwalk(&[
        "ingest",
        "--edges",
        &edges,
        "--relabel",
        "--split",
        "0.8,0.1,0.1",
        "--out-dir",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in [
        "graph.qwg",
        "id_map.txt",
        "train.txt",
        "valid.txt",
        "test.txt",
        "ingest.json",
    ] {
        assert!(Path::new(&out).join(name).exists(), "{name}");
    }
    let graph = s(&Path::new(&out).join("graph.qwg"));
    let o = qwalk(&["score", "--edges", &graph, "--pair", "0,1", "--scorer", "cn"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn thread_count_from_environment_does_not_change_results() {
    let f = Fixture::new();
    let [train, valid, test] = f.splits();
    let run = |threads: &str| {
        let out = f.path("t");
        let _ = std::fs::remove_dir_all(&out);
        let o = Command::new(env!("CARGO_BIN_EXE_qwalk"))
            .args([
                "eval",
                "--train",
                &train,
                "--valid",
                &valid,
                "--test",
                &test,
                "--count",
                "25",
                "--out-dir",
                &out,
            ])
            .env("QWALK_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(Path::new(&out).join("summary.csv")).unwrap()
    };
    assert_eq!(run("1"), run("3"));
    let bad = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(["verify", "--out", &f.path("x.json")])
        .env("QWALK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
