use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::SeedableRng;
use re2nli_core::ingest::{write_split, SplitName};
use re2nli_core::packs;
use re2nli_core::synthetic::random_split;
use tempfile::TempDir;

fn re2nli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_re2nli"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_line(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    let line = stderr.lines().last().unwrap();
    serde_json::from_str(line).unwrap()
}

/// A synthetic split for `schema` written to `<dir>/<schema>/train.jsonl`.
fn write_synthetic_n(dir: &Path, schema: &str, n: usize) -> PathBuf {
    let schema_def = packs::schema(schema).unwrap();
    let mut rng = StdRng::seed_from_u64(5);
    let split = random_split(&mut rng, &schema_def, n, SplitName::Train);
    let sub = dir.join(schema);
    std::fs::create_dir_all(&sub).unwrap();
    let p = sub.join("train.jsonl");
    let mut buf = Vec::new();
    write_split(&split, &mut buf).unwrap();
    std::fs::write(&p, buf).unwrap();
    p
}

fn write_synthetic(dir: &TempDir, schema: &str) -> PathBuf {
    write_synthetic_n(dir.path(), schema, 200)
}

#[test]
fn verify_matrix_passes_for_bundled_packs() {
    for name in ["chemprot", "retacred", "biored_novel"] {
        let out = re2nli(&["verify-matrix", "--schema", name]);
        assert!(out.status.success(), "{name}");
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.starts_with(&format!("PASS {name}")), "{stdout}");
    }
}

#[test]
fn verify_matrix_reports_mismatch_with_exit_2() {
    let dir = TempDir::new().unwrap();
    let fixture = packs::fixture_matrix("chemprot").unwrap().to_fixture_json();
    let mut value: serde_json::Value = serde_json::from_str(&fixture).unwrap();
    // gold UPREGULATOR vs hypothesis DOWNREGULATOR: flip to neutral
    value["cells"][0][1] = serde_json::json!(1);
    value["cells"][1][0] = serde_json::json!(1);
    let p = dir.path().join("bad.json");
    std::fs::write(&p, value.to_string()).unwrap();
    let out = re2nli(&["verify-matrix", "--schema", "chemprot", "--fixture", path(&p)]);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("FAIL chemprot: 2 cell(s) differ"), "{stdout}");
}

#[test]
fn exit_codes_and_error_lines() {
    let dir = TempDir::new().unwrap();
    let out_file = dir.path().join("o.jsonl");

    let usage = re2nli(&["adapt", "--bogus"]);
    assert_eq!(usage.status.code(), Some(1));

    let train = write_synthetic(&dir, "semeval");
    let no_filter_choice = re2nli(&["adapt", "--schema", "semeval", "--split", path(&train), "--out", path(&out_file)]);
    assert_eq!(no_filter_choice.status.code(), Some(1));
    assert_eq!(error_line(&no_filter_choice)["kind"], "usage");

    let unknown = re2nli(&["stats", "--schema", "nope", "--split", path(&train)]);
    assert_eq!(unknown.status.code(), Some(2));
    let err = error_line(&unknown);
    assert_eq!(err["error"], "unknown_schema");
    assert_eq!(err["kind"], "validation");

    let missing = dir.path().join("missing.jsonl");
    let io = re2nli(&["adapt", "--schema", "semeval", "--split", path(&missing), "--no-filter", "--out", path(&out_file)]);
    assert_eq!(io.status.code(), Some(3));
    assert_eq!(error_line(&io)["kind"], "io");

    let bad = dir.path().join("train_bad.jsonl");
    std::fs::write(
        &bad,
        r#"{"id":"x","text":"ab","head":{"surface":"zz","type":"T","spans":[[0,1]]},"tail":{"surface":"b","type":"U","spans":[[1,2]]},"gold_label":"Other","dataset":"d"}"#,
    )
    .unwrap();
    let mismatch = re2nli(&["stats", "--schema", "semeval", "--split", path(&bad)]);
    assert_eq!(mismatch.status.code(), Some(2));
    assert!(error_line(&mismatch)["message"].as_str().unwrap().contains('x'));
}

#[test]
fn adapt_select_eval_with_oracle_predictions() {
    let dir = TempDir::new().unwrap();
    let train = write_synthetic(&dir, "semeval");
    let index = dir.path().join("index.json");
    let pairs = dir.path().join("pairs.jsonl");
    assert!(re2nli(&["build-index", "--schema", "semeval", "--split", path(&train), "--out", path(&index)]).status.success());
    assert!(re2nli(&[
        "adapt", "--schema", "semeval", "--split", path(&train), "--index", path(&index), "--out", path(&pairs)
    ])
    .status
    .success());

    // predictions that agree with every target
    let mut preds = String::new();
    for line in std::fs::read_to_string(&pairs).unwrap().lines() {
        let pair: serde_json::Value = serde_json::from_str(line).unwrap();
        let probs = match pair["target"].as_str().unwrap() {
            "entail" => [0.9, 0.05, 0.05],
            "neutral" => [0.1, 0.8, 0.1],
            _ => [0.1, 0.1, 0.8],
        };
        preds.push_str(&serde_json::json!({"pair_id": pair["pair_id"], "probs": probs}).to_string());
        preds.push('\n');
    }
    let pred_path = dir.path().join("pred.jsonl");
    std::fs::write(&pred_path, preds).unwrap();

    let out = re2nli(&["eval", "--schema", "semeval", "--pred", path(&pred_path), "--split", path(&train)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["micro_f1"], 1.0);
    assert_eq!(report["fp"], 0);
    assert_eq!(report["fn"], 0);

    // select then eval on the relation-level file gives the same report
    let selected = dir.path().join("selected.jsonl");
    assert!(re2nli(&["select", "--schema", "semeval", "--pred", path(&pred_path), "--out", path(&selected)]).status.success());
    let again = re2nli(&["eval", "--schema", "semeval", "--pred", path(&selected), "--split", path(&train)]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn merge_and_stats() {
    let dir = TempDir::new().unwrap();
    let train = write_synthetic(&dir, "chemprot");
    let a = dir.path().join("a.jsonl");
    let merged = dir.path().join("merged.jsonl");
    assert!(re2nli(&["adapt", "--schema", "chemprot", "--split", path(&train), "--no-filter", "--out", path(&a)]).status.success());
    let single = std::fs::read_to_string(&a).unwrap();

    // duplicate ids across inputs are rejected without a prefix
    let dup = re2nli(&["merge", path(&a), path(&a), "--out", path(&merged)]);
    assert_eq!(dup.status.code(), Some(2));

    let b = dir.path().join("b.jsonl");
    let gad_train = write_synthetic_n(dir.path(), "gad", 20);
    assert!(re2nli(&["adapt", "--schema", "gad", "--split", path(&gad_train), "--no-filter", "--out", path(&b)]).status.success());
    let ok = re2nli(&["merge", path(&a), path(&b), "--prefix-dataset", "--out", path(&merged)]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let text = std::fs::read_to_string(&merged).unwrap();
    assert_eq!(text.lines().count(), single.lines().count() + 20 * 2);
    assert!(text.lines().next().unwrap().contains("\"chemprot/syn00000::"));

    let stats = re2nli(&["stats", "--schema", "chemprot", "--split", path(&train)]);
    let report: serde_json::Value = serde_json::from_slice(&stats.stdout).unwrap();
    assert_eq!(report["total"], 200);
    let per_class: u64 = report["per_class"].as_array().unwrap().iter().map(|c| c[1].as_u64().unwrap()).sum();
    assert_eq!(per_class, 200);
}

#[test]
fn adapt_output_independent_of_thread_count() {
    let dir = TempDir::new().unwrap();
    let train = write_synthetic(&dir, "retacred");
    let mut outputs = Vec::new();
    for jobs in ["1", "2", "8"] {
        let out = dir.path().join(format!("o{jobs}.jsonl"));
        let status = re2nli(&[
            "--jobs", jobs, "adapt", "--schema", "retacred", "--split", path(&train), "--no-filter", "--out", path(&out),
        ]);
        assert!(status.status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}
