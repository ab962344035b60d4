use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn pipeline(args: &[&str], out: &Path, extra: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pipeline"));
    cmd.args(args)
        .arg("--config")
        .arg(fixtures().join("pipeline.toml"))
        .arg("--set")
        .arg(format!("paths.output_dir={}", out.display()));
    for s in extra {
        cmd.arg("--set").arg(s);
    }
    cmd.output().expect("spawn pipeline")
}

fn error_json(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().rev().find(|l| l.starts_with('{')).unwrap_or_else(|| panic!("no JSON on stderr: {stderr}"));
    serde_json::from_str(line).unwrap()
}

#[test]
fn lp_without_news_reports_missing_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = pipeline(&["lp"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    let e = error_json(&out);
    assert_eq!(e["error"]["kind"], "missing_artifact");
    assert_eq!(e["error"]["command"], "lp");
    assert!(e["error"]["path"].as_str().unwrap().ends_with("news.csv"));
}

#[test]
fn unknown_config_key_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = pipeline(&["preprocess"], dir.path(), &["lp.h_maks=3"]);
    assert_eq!(out.status.code(), Some(2));
    let e = error_json(&out);
    assert_eq!(e["error"]["kind"], "config");
    assert_eq!(e["error"]["key"], "lp.h_maks");
}

#[test]
fn published_topic_counts_give_26_prevalence_columns() {
    let dir = tempfile::tempdir().unwrap();
    let quick = [
        "lda_step1.n_topics=25",
        "lda_step2.n_topics=26",
        "lda_step1.total_iters=20",
        "lda_step1.burn_in=10",
        "lda_step2.total_iters=20",
        "lda_step2.burn_in=10",
        // a 20-sweep chain rarely isolates the tax topic cleanly
        "seed.dominance_floor=1.0",
    ];
    for stage in ["preprocess", "lda-step1", "seed", "lda-step2", "prevalence"] {
        let out = pipeline(&[stage], dir.path(), &quick);
        assert!(out.status.success(), "{stage}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let csv = std::fs::read_to_string(dir.path().join("prevalence.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let topics: Vec<&&str> = header.iter().filter(|h| h.starts_with("topic_")).collect();
    assert_eq!(topics.len(), 26);
    assert_eq!(*topics[25], "topic_25");
    for line in csv.lines().skip(1) {
        let row: Vec<&str> = line.split(',').collect();
        let sum: f64 = row[1..=26].iter().filter(|f| !f.is_empty()).map(|f| f.parse::<f64>().unwrap()).sum();
        assert!(row[1].is_empty() || (sum - 1.0).abs() < 1e-9, "{line}");
    }
}

#[test]
fn simulate_reproduces_the_shipped_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = pipeline(&["simulate"], dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["speeches.jsonl", "series.csv"] {
        let fresh = std::fs::read(dir.path().join("simulate").join(file)).unwrap();
        let shipped = std::fs::read(fixtures().join(file)).unwrap();
        assert!(fresh == shipped, "{file} differs from the shipped copy");
    }
}

#[test]
fn manifests_hash_inputs_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = pipeline(&["preprocess"], dir.path(), &[]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("manifests/preprocess.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(m["command"], "preprocess");
    let outputs = m["outputs"].as_array().unwrap();
    assert!(outputs.iter().any(|f| f["path"].as_str().unwrap().ends_with("vocab.tsv")));
    let inputs = m["inputs"].as_array().unwrap();
    assert!(inputs.iter().any(|f| f["path"].as_str().unwrap().ends_with("speeches.jsonl")));
    assert!(outputs.iter().chain(inputs).all(|f| f["sha256"].as_str().is_some_and(|s| s.len() == 64)));
}
