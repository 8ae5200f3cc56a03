//! End-to-end runs of the `orthofield` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orthofield"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_config(cfg: &Path, out: &Path, extra: &[&str]) -> (i32, String) {
    let o = bin().arg("--config").arg(cfg).arg("--out").arg(out).args(extra).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn transfer_check_example_passes_with_tiny_deviations() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, err) = run_config(&configs().join("transfer-check.json"), tmp.path(), &["--check"]);
    assert_eq!(code, 0, "{err}");
    let rep = read_json(&tmp.path().join("report.json"));
    assert_eq!(rep["kind"], "transfer-check");
    for s in rep["statistics"].as_array().unwrap() {
        assert!(s["value"].as_f64().unwrap() < 1e-12, "{s}");
    }
}

#[test]
fn decompose_example_matches_its_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, err) = run_config(&configs().join("decompose.json"), tmp.path(), &["--check", "--workers", "2"]);
    assert_eq!(code, 0, "{err}");
}

#[test]
fn golden_mismatch_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let mut golden = read_json(&configs().join("../crates/core/goldens/transfer-check.json"));
    golden["statistics"][0]["value"] = Value::from(1.0);
    write(tmp.path(), "golden.json", &golden.to_string());
    let mut cfg = read_json(&configs().join("transfer-check.json"));
    cfg["golden"] = Value::from("golden.json");
    cfg.as_object_mut().unwrap().remove("out");
    let p = write(tmp.path(), "cfg.json", &cfg.to_string());
    let (code, err) = run_config(&p, &tmp.path().join("out"), &["--check"]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("golden mismatch"), "{err}");
}

#[test]
fn zero_observable_takes_the_degenerate_path() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, err) = run_config(&configs().join("clt-zero.json"), tmp.path(), &[]);
    assert_eq!(code, 0, "{err}");
    let rep = read_json(&tmp.path().join("report.json"));
    let names: Vec<&str> = rep["statistics"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"max_abs_normalized_sum"));
}

#[test]
fn schema_violation_exits_1_with_a_field_pointer() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(
        tmp.path(),
        "bad.json",
        r#"{"schema_version": 1, "seed": 1, "experiment": {"kind": "simulate", "model": {"model": "linear", "rhoo": 0.5}, "n": [4, 4]}}"#,
    );
    let (code, err) = run_config(&p, &tmp.path().join("out"), &[]);
    assert_eq!(code, 1);
    assert!(err.contains("experiment.model") && err.contains("rhoo"), "{err}");
    let p = write(tmp.path(), "v2.json", r#"{"schema_version": 2, "seed": 1, "experiment": {"kind": "simulate", "model": {"model": "linear"}, "n": [4, 4]}}"#);
    assert_eq!(run_config(&p, &tmp.path().join("out"), &[]).0, 1);
}

#[test]
fn failed_expectation_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = read_json(&configs().join("conditions.json"));
    cfg["experiment"]["expect"]["modulus"] = Value::from("DIVERGENT");
    cfg.as_object_mut().unwrap().remove("out");
    let p = write(tmp.path(), "cfg.json", &cfg.to_string());
    assert_eq!(run_config(&p, &tmp.path().join("out"), &[]).0, 2);
}

#[test]
fn reruns_and_manifest_round_trip_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("simulate.json");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(run_config(&cfg, &a, &[]).0, 0);
    assert_eq!(run_config(&cfg, &b, &["--workers", "3"]).0, 0);
    assert_eq!(csvs(&a), csvs(&b));

    let manifest = read_json(&a.join("MANIFEST"));
    for (name, digest) in manifest["files"].as_object().unwrap() {
        let got = hex::encode(Sha256::digest(fs::read(a.join(name)).unwrap()));
        assert_eq!(&got, digest.as_str().unwrap(), "{name}");
    }
    // the resolved config reproduces the run
    let c = tmp.path().join("c");
    assert_eq!(run_config(&a.join("config.resolved.json"), &c, &[]).0, 0);
    assert_eq!(csvs(&a), csvs(&c));
    assert_eq!(read_json(&c.join("MANIFEST"))["config_hash"], manifest["config_hash"]);
}

#[test]
fn seed_override_changes_the_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("simulate.json");
    run_config(&cfg, &tmp.path().join("a"), &[]);
    run_config(&cfg, &tmp.path().join("b"), &["--seed", "17"]);
    assert_ne!(csvs(&tmp.path().join("a")), csvs(&tmp.path().join("b")));
    assert_eq!(read_json(&tmp.path().join("b/report.json"))["seed"], 17);
}

#[test]
fn every_example_config_parses() {
    for e in fs::read_dir(configs()).unwrap() {
        let p = e.unwrap().path();
        orthofield::cli::load_config(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
