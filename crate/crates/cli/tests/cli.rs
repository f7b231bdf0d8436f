//! End-to-end runs of the `locrete` binary over the sample files in `data/`.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn locrete(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locrete"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn run_reports_matches_touching_the_relevant_package() {
    let o = locrete(&[
        "run",
        "--graph",
        &data("host.json"),
        "--query",
        &data("path-query.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["vMap"]["p"], "p1");
}

#[test]
fn standard_engine_reports_every_match() {
    let o = locrete(&[
        "run",
        "--graph",
        &data("host.json"),
        "--query",
        &data("path-query.json"),
        "--engine",
        "standard",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 2);
}

#[test]
fn run_applies_changes_and_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let o = locrete(&[
        "run",
        "--graph",
        &data("host.json"),
        "--query",
        &data("path-query.json"),
        "--changes",
        &data("add-field.json"),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let fields: Vec<String> = json(&o)
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["vMap"]["f"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(fields, ["f1", "f3"]);
    let text = std::fs::read_to_string(trace).unwrap();
    assert!(text.lines().count() > 0);
    for line in text.lines() {
        let r: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(r.get("node").is_some() && r.get("added").is_some());
    }
}

#[test]
fn relevant_flag_replaces_the_file_selection() {
    let o = locrete(&[
        "run",
        "--graph",
        &data("host.json"),
        "--query",
        &data("path-query.json"),
        "--relevant",
        "f2",
    ]);
    assert_eq!(json(&o)[0]["vMap"]["p"], "p2");
}

#[test]
fn diff_detects_lost_interface() {
    let o = locrete(&[
        "diff",
        "--graph",
        &data("host.json"),
        "--query",
        &data("interface-query.json"),
        "--changes",
        &data("remove-interface.json"),
        "--relevant",
        "c1i1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["removed"].as_array().unwrap().len(), 1);
    assert!(v["added"].as_array().unwrap().is_empty());
}

#[test]
fn diff_rejects_changes_outside_the_relevant_subgraph() {
    let o = locrete(&[
        "diff",
        "--graph",
        &data("host.json"),
        "--query",
        &data("interface-query.json"),
        "--changes",
        &data("remove-interface.json"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("subgraph-restricted"));
}

#[test]
fn validate_checks_files_and_oracle() {
    let o = locrete(&[
        "validate",
        "--graph",
        &data("host.json"),
        "--query",
        &data("interface-query.json"),
        "--changes",
        &data("add-field.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("oracle: localized results agree"));
}

#[test]
fn validate_flags_malformed_query() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"vertices":[{"id":"a","type":"Pkg"}],"edges":[{"id":"e","type":"ce","src":"a","tgt":"missing"}]}"#).unwrap();
    let o = locrete(&[
        "validate",
        "--graph",
        &data("host.json"),
        "--query",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("query:"));
}

#[test]
fn missing_file_exits_with_io_code() {
    let o = locrete(&[
        "run",
        "--graph",
        "does-not-exist.json",
        "--query",
        &data("path-query.json"),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(
        locrete(&["run", "--graph", &data("host.json")])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(locrete(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(locrete(&["--help"]).status.code(), Some(0));
}

#[test]
fn dump_net_prints_markings() {
    let o = locrete(&[
        "dump-net",
        "--query",
        &data("path-query.json"),
        "--graph",
        &data("host.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph msrete {"));
    assert!(dot.contains("φ := 1") && dot.contains("∞)"));
    let o = locrete(&[
        "dump-net",
        "--query",
        &data("interface-query.json"),
        "--engine",
        "delta",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("f∘g⁻¹"));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = locrete(&[
        "bench",
        "--scenario",
        &data("synthetic.json"),
        "--sizes",
        "1,2",
        "--repetitions",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("scenario,size,engine,phase,time_ms,tuples,effective_size,checks_passed")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}
