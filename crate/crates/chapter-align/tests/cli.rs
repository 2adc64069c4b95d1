//! End-to-end checks of the command-line interface: exit codes (0 success,
//! 1 processing failure, 2 usage error), output files, and stderr logging.

use std::path::{Path, PathBuf};
use std::process::Output;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data/fixtures")
        .join(name)
}

fn combined_docs(dir: &Path) -> PathBuf {
    let chapter = std::fs::read_to_string(fixture("awakening_ch11_chapter.jsonl")).unwrap();
    let summaries = std::fs::read_to_string(fixture("awakening_ch11_summaries.jsonl")).unwrap();
    let path = dir.join("docs.jsonl");
    std::fs::write(&path, format!("{chapter}{summaries}")).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_chapter-align"))
        .args(args)
        .output()
        .unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn align_happy_path_exits_zero_and_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let docs = combined_docs(dir.path());
    let out = dir.path().join("alignment.jsonl");
    let report = dir.path().join("report.tsv");

    let result = run(&[
        "align",
        "--docs",
        docs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 0, "stderr: {}", stderr(&result));

    let records = std::fs::read_to_string(&out).unwrap();
    assert_eq!(records.lines().count(), 3);
    for line in records.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["chapter_id"], "awakening_ch11");
        assert_eq!(v["method"], "stable_sent");
        assert_eq!(v["metric"], "r-wtd");
        assert!(!v["pairs"].as_array().unwrap().is_empty());
    }
    let report = std::fs::read_to_string(&report).unwrap();
    assert!(report.starts_with("summary_id\t"));
    assert_eq!(report.lines().count(), 4);
}

#[test]
fn cosine_without_vectors_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let docs = combined_docs(dir.path());
    let result = run(&[
        "align",
        "--docs",
        docs.to_str().unwrap(),
        "--out",
        dir.path().join("a.jsonl").to_str().unwrap(),
        "--metric",
        "cosine",
    ]);
    assert_eq!(exit_code(&result), 2);
    assert!(stderr(&result).contains("--vectors"), "stderr: {}", stderr(&result));
}

#[test]
fn empty_docs_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let docs = dir.path().join("empty.jsonl");
    std::fs::write(&docs, "").unwrap();
    let result = run(&[
        "align",
        "--docs",
        docs.to_str().unwrap(),
        "--out",
        dir.path().join("a.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 2, "stderr: {}", stderr(&result));
}

#[test]
fn malformed_docs_line_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let docs = dir.path().join("bad.jsonl");
    std::fs::write(&docs, "{\"doc_id\": \"x\", \"role\":").unwrap();
    let result = run(&[
        "align",
        "--docs",
        docs.to_str().unwrap(),
        "--out",
        dir.path().join("a.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 2);
    assert!(stderr(&result).contains("line 1"), "stderr: {}", stderr(&result));
}

#[test]
fn unknown_metric_is_rejected_by_the_parser() {
    let result = run(&["align", "--docs", "x", "--out", "y", "--metric", "bleu"]);
    assert_eq!(exit_code(&result), 2);
}

#[test]
fn missing_vector_entries_fail_pairs_but_not_startup() {
    let dir = tempfile::tempdir().unwrap();
    let docs = combined_docs(dir.path());
    let vectors = dir.path().join("vectors.jsonl");
    std::fs::write(
        &vectors,
        "{\"segment_id\": \"awakening_ch11/s0\", \"vector\": [1.0, 0.0]}\n",
    )
    .unwrap();

    let result = run(&[
        "align",
        "--docs",
        docs.to_str().unwrap(),
        "--out",
        dir.path().join("a.jsonl").to_str().unwrap(),
        "--metric",
        "cosine",
        "--vectors",
        vectors.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 1, "stderr: {}", stderr(&result));
    assert!(stderr(&result).contains("3 of 3 pairs failed"), "stderr: {}", stderr(&result));
}

#[test]
fn constituent_pipeline_without_trees_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let docs = combined_docs(dir.path());
    let result = run(&[
        "pipeline",
        "--docs",
        docs.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
        "--segments",
        "constituent",
    ]);
    assert_eq!(exit_code(&result), 2);
    assert!(stderr(&result).contains("--trees"), "stderr: {}", stderr(&result));
}

#[test]
fn summary_level_cosine_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let docs = combined_docs(dir.path());
    let vectors = dir.path().join("vectors.jsonl");
    std::fs::write(
        &vectors,
        "{\"segment_id\": \"awakening_ch11/s0\", \"vector\": [1.0, 0.0]}\n",
    )
    .unwrap();
    let result = run(&[
        "align",
        "--docs",
        docs.to_str().unwrap(),
        "--out",
        dir.path().join("a.jsonl").to_str().unwrap(),
        "--metric",
        "cosine",
        "--method",
        "ws",
        "--vectors",
        vectors.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 2);
}

#[test]
fn constituent_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let docs = combined_docs(dir.path());
    let out_dir = dir.path().join("out");
    let result = run(&[
        "pipeline",
        "--docs",
        docs.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--segments",
        "constituent",
        "--trees",
        fixture("awakening_ch11_trees.txt").to_str().unwrap(),
        "--method",
        "greedy",
        "--metric",
        "r1",
    ]);
    assert_eq!(exit_code(&result), 0, "stderr: {}", stderr(&result));
    for name in ["alignment.jsonl", "extract.jsonl", "scores.tsv", "pipeline.tsv"] {
        let content = std::fs::read_to_string(out_dir.join(name)).unwrap();
        assert!(!content.is_empty(), "{name} is empty");
    }
    let pipeline = std::fs::read_to_string(out_dir.join("pipeline.tsv")).unwrap();
    let row = pipeline.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split('\t').collect();
    assert_eq!(fields[0], "awakening_ch11");
    let target: u64 = fields[4].parse().unwrap();
    assert!(target > 0);
}

#[test]
fn weight_table_prints_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let docs = combined_docs(dir.path());
    let result = run(&["weight", "--docs", docs.to_str().unwrap()]);
    assert_eq!(exit_code(&result), 0, "stderr: {}", stderr(&result));
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.starts_with("key\tcount\tp\tW"));
    assert!(stdout.lines().count() > 100);
}

#[test]
fn score_reports_every_requested_metric() {
    let dir = tempfile::tempdir().unwrap();
    let generated = dir.path().join("generated.jsonl");
    std::fs::write(
        &generated,
        "{\"doc_id\": \"gen\", \"role\": \"reference_summary\", \"sentences\": [\"Edna sat on the porch .\"]}\n",
    )
    .unwrap();
    let result = run(&[
        "score",
        "--generated",
        generated.to_str().unwrap(),
        "--references",
        fixture("awakening_ch11_summaries.jsonl").to_str().unwrap(),
        "--metrics",
        "r1,rl",
    ]);
    assert_eq!(exit_code(&result), 0, "stderr: {}", stderr(&result));
    let stdout = String::from_utf8_lossy(&result.stdout);
    // header + 2 metrics x (3 references + mean + best)
    assert_eq!(stdout.lines().count(), 11);
    assert!(stdout.contains("r1\tawakening_ch11_bookwolf"));
    assert!(stdout.contains("r1\tmean"));
    assert!(stdout.contains("rl\tbest"));
}

#[test]
fn weighted_score_without_chapter_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let generated = dir.path().join("generated.jsonl");
    std::fs::write(
        &generated,
        "{\"doc_id\": \"gen\", \"role\": \"reference_summary\", \"sentences\": [\"Edna sat .\"]}\n",
    )
    .unwrap();
    let result = run(&[
        "score",
        "--generated",
        generated.to_str().unwrap(),
        "--references",
        fixture("awakening_ch11_summaries.jsonl").to_str().unwrap(),
        "--metrics",
        "r-wtd",
    ]);
    assert_eq!(exit_code(&result), 2);
    assert!(stderr(&result).contains("--chapter"), "stderr: {}", stderr(&result));
}
