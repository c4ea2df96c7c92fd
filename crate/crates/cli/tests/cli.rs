use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn banachlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_banachlab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn constants_on_euclidean_plane() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "lp2.json", r#"{"dim": 2, "kind": "lp", "p": 2}"#);
    let out = banachlab(&["constants", "--space", &space, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], "1");
    for key in ["cnj", "cbm", "dbm"] {
        let v = r[key]["value"].as_f64().unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{key} = {v}");
    }
}

#[test]
fn hilbert_projection_audit() {
    let out = banachlab(&[
        "proj-audit", "--dim", "3", "--norm", "quadratic:identity", "--trials", "50", "--seed", "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let audits = r["audits"].as_array().unwrap();
    assert_eq!(audits.len(), 50);
    for a in audits {
        let np = a["norm_p"]["lower"].as_f64().unwrap();
        let nq = a["norm_i_minus_p"]["lower"].as_f64().unwrap();
        assert!((np - nq).abs() <= 1e-8);
    }
}

#[test]
fn fem_problem_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(
        dir.path(),
        "fem.json",
        r#"{"fem1d": {"elements": 8, "epsilon": 1, "beta": 0, "variant": "galerkin"}}"#,
    );
    let out = banachlab(&["pg-verify", "--problem", &problem, "--cbm", "1", "--seed", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rows = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rows.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "slack_xz").unwrap();
    let record = rows.records().next().unwrap().unwrap();
    assert!(record[col].parse::<f64>().unwrap() >= 0.0);
    assert_eq!(&record[0], "fem1d(N=8, eps=1, beta=0, galerkin, k=2)");
}

#[test]
fn violation_exits_with_one() {
    // C_BM = 1 is not a valid constant for the l-infinity plane.
    let out = banachlab(&[
        "proj-audit", "--dim", "2", "--norm", "lp:inf", "--trials", "20", "--samples", "64", "--cbm", "1", "--seed", "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["failed"].as_u64().unwrap() > 0);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let lp3 = write(dir.path(), "lp3.json", r#"{"dim": 3, "kind": "lp", "p": 3}"#);
    let broken = write(dir.path(), "broken.json", r#"{"dim": 2, "kind": "lp"}"#);
    for args in [
        vec!["constants", "--space", lp3.as_str()],
        vec!["dbm", "--space", lp3.as_str(), "--seed", "1"],
        vec!["constants", "--space", broken.as_str(), "--seed", "1"],
        vec!["constants", "--space", "/nonexistent/space.json", "--seed", "1"],
        vec!["pg-verify", "--problem", lp3.as_str(), "--seed", "1"],
        vec!["proj-audit", "--dim", "3", "--norm", "lp:x", "--seed", "1"],
        vec!["proj-audit", "--dim", "3", "--norm", "lp:2", "--seed", "1", "--tol", "0"],
        vec!["suite", "--seed", "1", "--format", "xml"],
    ] {
        assert_eq!(banachlab(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn reports_are_reproducible_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "hex.json", r#"{"dim": 2, "kind": "polytope", "vertices": [[1, 0], [0.5, 0.866], [-0.5, 0.866], [-1, 0], [-0.5, -0.866], [0.5, -0.866]]}"#);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = banachlab(&["proj-audit", "--space", &space, "--trials", "5", "--samples", "32", "--seed", "5", "--out", out.to_str().unwrap()]);
        assert_eq!(status.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
    let text = banachlab(&["dbm", "--space", &space, "--seed", "0", "--format", "text"]);
    assert!(String::from_utf8(text.stdout).unwrap().contains("d_BM"));
}
