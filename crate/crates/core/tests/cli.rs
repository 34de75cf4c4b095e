//! End-to-end runs of the workbench binary on the sample inputs in data/.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use smoothbench::io::read_structure;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn workbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_workbench")).args(args).output().unwrap()
}

fn reports(dir: &Path) -> Vec<Value> {
    fs::read_to_string(dir.join("reports.jsonl")).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = workbench(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn empty_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    fs::write(&cfg, "{}").unwrap();
    let out = workbench(&["run", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("operation"));
}

#[test]
fn unknown_class_and_zero_caps_fail() {
    assert_eq!(workbench(&["check-class", "--class", "nope", "--prop", "AP"]).status.code(), Some(1));
    assert_eq!(workbench(&["check-class", "--class", "all_graphs", "--prop", "AP", "--max-size", "0"]).status.code(), Some(1));
}

#[test]
fn check_class_writes_a_holds_report_with_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(&[
        "check-class", "--class", "shelah_spencer:1/2", "--prop", "fAP", "--max-size", "3",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let r = &reports(dir.path())[0];
    assert_eq!(r["verdict"], "holds");
    assert_eq!(r["bounds"]["max_size"], 3);
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
    // Wall-clock lives in its own file.
    assert!(r.get("wall_clock").is_none());
    assert!(fs::read_to_string(dir.path().join("timing.jsonl")).unwrap().contains("wall_clock_ms"));
}

#[test]
fn no_edges_out_eppa_reports_none_with_a_certificate() {
    let inst = data("no_edges_out_eppa.json");
    let out = workbench(&["eppa", "--class", "no_edges_out", "--instance", inst.to_str().unwrap(), "--max-size", "6"]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["verdict"], "none");
    assert_eq!(r["payload"]["certificate"]["holds"], true);
}

#[test]
fn emitted_structures_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(&[
        "grow", "--class", "all_graphs", "--steps", "6", "--cap", "2", "--format", "dot",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let r = &reports(dir.path())[0];
    let files = r["files"].as_array().unwrap();
    assert!(!files.is_empty());
    for f in files {
        let path = dir.path().join(f.as_str().unwrap());
        let s = read_structure(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(smoothbench::io::to_json(&s) + "\n", text);
        assert!(path.with_extension("dot").exists());
    }
}

#[test]
fn class_file_names_resolve() {
    let out = workbench(&[
        "--classes", data("classes.txt").to_str().unwrap(),
        "minpair-chain", "--merge", "halves", "--length", "2", "--cap", "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["verdict"], "complete");
    assert_eq!(r["payload"]["chain"].as_array().unwrap().len(), 3);
}

#[test]
fn ramsey_check_on_chains() {
    let args = |c: &str| {
        workbench(&[
            "ramsey-check", "--class", "linear_orders",
            "--a", data("point.json").to_str().unwrap(),
            "--b", data("chain2.json").to_str().unwrap(),
            "--c", data(c).to_str().unwrap(),
        ])
    };
    let r: Value = serde_json::from_slice(&args("chain3.json").stdout).unwrap();
    assert_eq!(r["verdict"], "holds");
    let r: Value = serde_json::from_slice(&args("chain2.json").stdout).unwrap();
    assert_eq!(r["verdict"], "fails");
}

#[test]
fn filtered_demo_is_byte_identical_on_rerun() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = workbench(&["demo", "--scenario", "initial-segment-orders", "--out", d.path().to_str().unwrap()]);
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("[pass]"));
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("reports.jsonl")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(reports(a.path()).len(), 1);
}

#[test]
fn thread_bound_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(["demo", "--scenario", "11"])
        .env("WORKBENCH_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(["demo", "--scenario", "11"])
        .env("WORKBENCH_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}
