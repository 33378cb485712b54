use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use airsent_core::{Airline, Store};

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("airsent.toml"),
            "data_dir = \"data\"\nmodel = \"models/model.json\"\nreports_dir = \"reports\"\n",
        )
        .unwrap();
        Workspace { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_airsent"))
            .arg("--config")
            .arg(self.path("airsent.toml"))
            .args(args)
            .env("RUST_LOG", "warn")
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    }

    fn store(&self) -> Store {
        Store::open(self.path("data")).unwrap()
    }
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn head_lines(src: &Path, n: usize, dst: &Path) {
    let text: String = std::fs::read_to_string(src).unwrap().lines().take(n).map(|l| format!("{l}\n")).collect();
    std::fs::write(dst, text).unwrap();
}

#[test]
fn ingest_reports_counts_and_is_idempotent() {
    let ws = Workspace::new();
    let input = ws.path("fifty.jsonl");
    head_lines(&core_fixture("tweets-delta.jsonl"), 50, &input);
    let first = ws.ok(&["ingest", input.to_str().unwrap(), "--airline", "delta"]);
    assert_eq!(first.trim(), "delta: accepted 50, duplicates 0, rejected 0");
    let second = ws.ok(&["ingest", input.to_str().unwrap(), "--airline", "delta"]);
    assert_eq!(second.trim(), "delta: accepted 0, duplicates 50, rejected 0");
}

#[test]
fn usage_errors_exit_two() {
    let ws = Workspace::new();
    let missing = ws.run(&["ingest", "/nonexistent/tweets.jsonl", "--airline", "delta"]);
    assert_eq!(code(&missing), 2);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error"));
    assert_eq!(code(&ws.run(&["ingest", "x.jsonl", "--airline", "lufthansa"])), 2);
    assert_eq!(code(&ws.run(&["score", "--model", "/nonexistent/model.json"])), 2);
    assert_eq!(code(&ws.run(&["report", "--airline", "delta"])), 2);
    assert_eq!(code(&ws.run(&["frobnicate"])), 2);

    let bad = ws.path("bad.csv");
    std::fs::write(&bad, "tweet_id,comment\n1,hello\n").unwrap();
    assert_eq!(code(&ws.run(&["train", bad.to_str().unwrap()])), 2);

    std::fs::write(ws.path("broken.toml"), "window = [").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_airsent"))
        .args(["--config", ws.path("broken.toml").to_str().unwrap(), "ingest", "x", "--airline", "delta"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn train_is_deterministic() {
    let ws = Workspace::new();
    let sample = core_fixture("kaggle-sample-20.csv");
    let a = ws.ok(&["train", sample.to_str().unwrap(), "--seed", "7"]);
    assert!(a.contains("accuracy"));
    assert!(ws.path("models/model.json").is_file());
    let b = ws.ok(&["train", sample.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(a, b);
}

#[test]
fn score_fills_only_unscored_records() {
    let ws = Workspace::new();
    let sample = core_fixture("kaggle-sample-20.csv");
    ws.ok(&["train", sample.to_str().unwrap()]);
    let input = ws.path("ten.jsonl");
    head_lines(&core_fixture("tweets-american.jsonl"), 10, &input);
    ws.ok(&["ingest", input.to_str().unwrap(), "--airline", "american"]);
    assert_eq!(ws.ok(&["score"]).trim(), "american: scored 10");
    let records = ws.store().load_all(Airline::American).unwrap();
    assert_eq!(records.len(), 10);
    for r in &records {
        assert_eq!(r.p_positive.unwrap() + r.p_negative.unwrap(), 1.0);
    }
    assert_eq!(ws.ok(&["score", "--airline", "american"]).trim(), "american: scored 0");
    assert_eq!(ws.store().load_all(Airline::American).unwrap(), records);
}

fn scored_workspace() -> Workspace {
    let ws = Workspace::new();
    ws.ok(&["train", core_fixture("labeled-500.csv").to_str().unwrap()]);
    for airline in ["american", "delta"] {
        let input = core_fixture(&format!("tweets-{airline}.jsonl"));
        ws.ok(&["ingest", input.to_str().unwrap(), "--airline", airline]);
    }
    ws.ok(&["score"]);
    ws
}

#[test]
fn report_flags_the_dip_and_is_reproducible() {
    let ws = scored_workspace();
    let a = ws.ok(&["report", "--airline", "delta", "--out", ws.path("a").to_str().unwrap()]);
    assert!(a.contains("2023-03-19 below_lower"), "{a}");
    ws.ok(&["report", "--airline", "delta", "--window", "14", "--k", "2", "--out", ws.path("b").to_str().unwrap()]);
    let mut names: Vec<_> = std::fs::read_dir(ws.path("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 3);
    for name in &names {
        let left = std::fs::read(ws.path("a").join(name)).unwrap();
        let right = std::fs::read(ws.path("b").join(name)).unwrap();
        assert_eq!(left, right, "{name:?}");
    }
    let words = std::fs::read_to_string(ws.path("a/delta-words-2023-03-19_2023-03-19.csv")).unwrap();
    assert_eq!(words.lines().nth(1).unwrap().split(',').next().unwrap(), "cancel");

    // Window before the dip: nothing to flag.
    let quiet = ws.ok(&["report", "--airline", "delta", "--to", "2023-03-10", "--out", ws.path("c").to_str().unwrap()]);
    assert!(quiet.contains(": 0 breakouts"), "{quiet}");
    let breakouts = std::fs::read_to_string(ws.path("c/delta-breakouts.csv")).unwrap();
    assert_eq!(breakouts.lines().count(), 1);

    assert_eq!(code(&ws.run(&["report", "--airline", "delta", "--window", "0"])), 2);
    assert_eq!(code(&ws.run(&["report", "--airline", "delta", "--from", "2024-01-01", "--to", "2024-01-31"])), 2);
    assert_eq!(code(&ws.run(&["report", "--airline", "delta", "--from", "2023-03-01", "--to", "2023-02-01"])), 2);
}
