//! End-to-end tests of the `opplearn` binary.

use std::path::Path;
use std::process::{Command, Output};

fn opplearn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opplearn"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = opplearn(dir, args);
    assert!(
        out.status.success(),
        "opplearn {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(dir: &Path, args: &[&str]) -> String {
    let out = opplearn(dir, args);
    assert!(!out.status.success(), "opplearn {args:?} unexpectedly succeeded");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn sample_writes_the_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(
        dir.path(),
        &["sample", "--fn", "square", "--n", "1000", "--mode", "grid", "--out", "d.csv"],
    );
    assert!(stdout.contains("1000"), "row count missing: {stdout}");
    let text = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,y"));
    assert_eq!(lines.count(), 1000);
}

#[test]
fn sample_rejects_unknown_functions_listing_the_registry() {
    let dir = tempfile::tempdir().unwrap();
    let stderr = fails(dir.path(), &["sample", "--fn", "nope", "--out", "d.csv"]);
    for name in ["square", "ackley", "bulkin", "booth", "cubic_shift"] {
        assert!(stderr.contains(name), "registry id {name} not listed: {stderr}");
    }
}

#[test]
fn sample_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sample", "--fn", "log_shift", "--n", "50", "--mode", "uniform", "--seed", "3", "--out",
        "d.csv",
    ];
    ok(dir.path(), &args);
    let first = std::fs::read(dir.path().join("d.csv")).unwrap();
    ok(dir.path(), &args);
    let second = std::fs::read(dir.path().join("d.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn mine_preserves_row_count_and_prints_stats() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["sample", "--fn", "linear2x", "--n", "100", "--mode", "grid", "--out", "d.csv"],
    );
    let stdout = ok(
        dir.path(),
        &["mine", "--in", "d.csv", "--scheme", "t1", "--out", "m.csv"],
    );
    assert!(stdout.contains("y_min=0"), "stats missing: {stdout}");
    assert!(stdout.contains("y_max=20"), "stats missing: {stdout}");
    let text = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,ox1,y,target_y,achieved_y,fallback"));
    assert_eq!(lines.count(), 100);
}

#[test]
fn mine_flags_fallback_rows_under_t3() {
    // Squaring skews the outputs, so the mean reflection exits the range for
    // large outputs and those rows fall back.
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["sample", "--fn", "square", "--n", "200", "--mode", "grid", "--out", "d.csv"],
    );
    ok(dir.path(), &["mine", "--in", "d.csv", "--scheme", "t3", "--out", "m.csv"]);
    let text = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    let flagged = text
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(",1"))
        .count();
    let unflagged = text
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(",0"))
        .count();
    assert!(flagged > 0, "expected some fallback rows");
    assert!(unflagged > 0, "expected some in-range rows");
}

#[test]
fn mine_rejects_an_empty_dataset() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.csv"), "x1,y\n").unwrap();
    let stderr = fails(
        dir.path(),
        &["mine", "--in", "d.csv", "--scheme", "t1", "--out", "m.csv"],
    );
    assert!(stderr.contains("usage error"), "got: {stderr}");
}

fn prepare_mined(dir: &Path) {
    ok(
        dir,
        &["sample", "--fn", "square", "--n", "300", "--mode", "grid", "--out", "d.csv"],
    );
    ok(dir, &["mine", "--in", "d.csv", "--scheme", "t1", "--out", "m.csv"]);
}

#[test]
fn train_writes_model_and_history_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    prepare_mined(dir.path());
    let args = [
        "train", "--in", "m.csv", "--hidden", "8", "--epochs", "200", "--lr", "0.2", "--seed",
        "7", "--out", "model.json",
    ];
    ok(dir.path(), &args);
    let model_a = std::fs::read(dir.path().join("model.json")).unwrap();
    let history = std::fs::read_to_string(dir.path().join("model.history.csv")).unwrap();
    assert!(history.starts_with("epoch,train_mse,val_mse\n"));
    assert!(history.lines().count() >= 2);

    ok(dir.path(), &args);
    let model_b = std::fs::read(dir.path().join("model.json")).unwrap();
    assert_eq!(model_a, model_b, "retraining with identical flags changed the model");
}

#[test]
fn train_rejects_zero_hidden_units() {
    let dir = tempfile::tempdir().unwrap();
    prepare_mined(dir.path());
    let stderr = fails(
        dir.path(),
        &["train", "--in", "m.csv", "--hidden", "0", "--out", "model.json"],
    );
    assert!(stderr.contains("usage error"), "got: {stderr}");
}

#[test]
fn eval_emits_the_report_with_reference_and_welch() {
    let dir = tempfile::tempdir().unwrap();
    prepare_mined(dir.path());
    ok(
        dir.path(),
        &["train", "--in", "m.csv", "--epochs", "500", "--seed", "1", "--out", "model.json"],
    );
    let stdout = ok(
        dir.path(),
        &["eval", "--fn", "square", "--scheme", "t1", "--model", "model.json", "--seed", "4"],
    );
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["function"], "square");
    assert_eq!(report["scheme"], "t1");
    assert_eq!(report["n_test"], 200);
    assert!(report["ann"]["mean"].is_f64());
    assert!(report["ann"]["std"].is_f64());
    assert_eq!(report["reference_fuzzy"]["mean"], 3.04);
    assert_eq!(report["reference_fuzzy"]["std"], 1.72);
    assert!(report["welch"]["t"].is_f64());
    assert!(report["welch"]["p"].is_f64());
    // Full config echo for provenance.
    assert_eq!(report["config"]["function"], "square");
    assert_eq!(report["config"]["seed"], 4);
    assert_eq!(report["config"]["n_test"], 200);
    assert!(report["config"]["test_seed"].is_u64());
}

#[test]
fn eval_rejects_two_dimensional_functions() {
    let dir = tempfile::tempdir().unwrap();
    prepare_mined(dir.path());
    ok(
        dir.path(),
        &["train", "--in", "m.csv", "--epochs", "100", "--out", "model.json"],
    );
    let stderr = fails(
        dir.path(),
        &["eval", "--fn", "booth", "--model", "model.json"],
    );
    assert!(stderr.contains("unsupported function"), "got: {stderr}");
}

fn prepare_2d_model(dir: &Path) {
    ok(
        dir,
        &["sample", "--fn", "bulkin", "--n", "400", "--mode", "uniform", "--seed", "2", "--out",
          "d2.csv"],
    );
    ok(dir, &["mine", "--in", "d2.csv", "--scheme", "t1", "--out", "m2.csv"]);
    ok(
        dir,
        &["train", "--in", "m2.csv", "--epochs", "300", "--seed", "2", "--out", "m2d.json"],
    );
}

#[test]
fn optimize_emits_the_comparison_table() {
    let dir = tempfile::tempdir().unwrap();
    prepare_2d_model(dir.path());
    let stdout = ok(
        dir.path(),
        &["optimize", "--fn", "bulkin", "--model", "m2d.json", "--runs", "5", "--seed", "3"],
    );
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        for column in ["random", "type2_ann", "type1"] {
            assert!(row[column]["mean"].is_f64(), "missing {column} in {row}");
        }
    }
    assert_eq!(report["table"].as_array().unwrap().len(), 5);
    // Default n_samples is 1000, so each run is 100 iterations.
    assert_eq!(report["config"]["n_iters"], 100);
    assert_eq!(report["config"]["seed"], 3);
}

#[test]
fn optimize_csv_mirrors_the_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    prepare_2d_model(dir.path());
    ok(
        dir.path(),
        &["optimize", "--fn", "bulkin", "--model", "m2d.json", "--runs", "2", "--seed", "3",
          "--format", "csv", "--out", "table.csv"],
    );
    let text = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("run,random,type2_ann,type1"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row.contains('±'), "cells should be `mean ± std`: {row}");
    }
}

#[test]
fn optimize_rejects_one_dimensional_functions_and_missing_models() {
    let dir = tempfile::tempdir().unwrap();
    prepare_2d_model(dir.path());
    let stderr = fails(
        dir.path(),
        &["optimize", "--fn", "square", "--model", "m2d.json"],
    );
    assert!(stderr.contains("usage error"), "got: {stderr}");
    let stderr = fails(
        dir.path(),
        &["optimize", "--fn", "bulkin", "--model", "missing.json"],
    );
    assert!(stderr.contains("error"), "got: {stderr}");
}
