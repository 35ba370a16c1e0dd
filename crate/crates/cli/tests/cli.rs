use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hamcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, residual: Option<&str>, seed: &str) -> (PathBuf, PathBuf) {
    let h0 = path(dir, &format!("h0-{seed}.json"));
    let h = path(dir, &format!("h-{seed}.json"));
    let mut args = vec![
        "gen",
        "--n",
        "2",
        "--m",
        "3",
        "--seed",
        seed,
        "--out",
        s(&h0),
    ];
    if let Some(r) = residual {
        args.extend(["--residual", r, "--h-out", s(&h)]);
    }
    let out = hamcert(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    if residual.is_none() {
        std::fs::copy(&h0, &h).unwrap();
    }
    (h0, h)
}

#[test]
fn identical_files_accept() {
    let dir = TempDir::new().unwrap();
    let (h0, h) = gen(&dir, None, "1");
    let report = path(&dir, "report.json");
    let out = hamcert(&[
        "certify",
        "--method",
        "chc",
        "--h",
        s(&h),
        "--h0",
        s(&h0),
        "--m",
        "3",
        "--eps",
        "0.2",
        "--out",
        s(&report),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["schema_version"], "v1");
    assert_eq!(v["verdict"], "accept");
    assert_eq!(v["method"], "chc");
    assert!(v["total_time"].as_f64().unwrap() > 0.0);
    assert_eq!(v["eps"], 0.2);
}

#[test]
fn planted_residual_rejects() {
    let dir = TempDir::new().unwrap();
    let (h0, h) = gen(&dir, Some("0.4"), "2");
    for method in ["rchc", "shc"] {
        let out = hamcert(&[
            "certify",
            "--method",
            method,
            "--h",
            s(&h),
            "--h0",
            s(&h0),
            "--m",
            "3",
            "--eps1",
            "0.1",
            "--eps2",
            "0.2",
            "--eps",
            "0.2",
            "--seed",
            "5",
        ]);
        assert_eq!(
            out.status.code(),
            Some(1),
            "{method}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn malformed_files_exit_two() {
    let dir = TempDir::new().unwrap();
    let (h0, _) = gen(&dir, None, "3");
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, r#"{"n": 2, "terms": []}"#).unwrap();
    let missing = path(&dir, "missing.json");
    for (h, h0) in [(&bad, &h0), (&h0, &bad), (&missing, &h0)] {
        let out = hamcert(&[
            "certify",
            "--h",
            s(h),
            "--h0",
            s(h0),
            "--m",
            "3",
            "--eps1",
            "0.1",
            "--eps2",
            "0.3",
        ]);
        assert_eq!(out.status.code(), Some(2));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn invalid_ranges_exit_two() {
    let dir = TempDir::new().unwrap();
    let (h0, h) = gen(&dir, None, "4");
    let cases: [&[&str]; 5] = [
        &["--eps1", "0.3", "--eps2", "0.1"],
        &["--eps1", "0.1", "--eps2", "0.3", "--delta", "0.5"],
        &["--method", "shc", "--eps", "0.3"],
        &[
            "--method", "chc", "--norm", "schatten", "--p", "3", "--eps", "0.1",
        ],
        &["--method", "chc", "--norm", "pauli", "--eps", "0.1"],
    ];
    for extra in cases {
        let mut args = vec!["certify", "--h", s(&h), "--h0", s(&h0), "--m", "3"];
        args.extend_from_slice(extra);
        assert_eq!(hamcert(&args).status.code(), Some(2), "{extra:?}");
    }
    assert_eq!(hamcert(&["certify", "--bogus"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (h0, h) = gen(&dir, Some("0.05"), "6");
    let run = |name: &str| {
        let p = path(&dir, name);
        hamcert(&[
            "certify",
            "--method",
            "shc",
            "--h",
            s(&h),
            "--h0",
            s(&h0),
            "--m",
            "3",
            "--eps",
            "0.2",
            "--seed",
            "9",
            "--trials",
            "3",
            "--out",
            s(&p),
        ]);
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn trials_aggregate_per_trial_records() {
    let dir = TempDir::new().unwrap();
    let (h0, h) = gen(&dir, None, "7");
    let out = hamcert(&[
        "certify",
        "--h",
        s(&h),
        "--h0",
        s(&h0),
        "--m",
        "3",
        "--eps1",
        "0.1",
        "--eps2",
        "0.3",
        "--seed",
        "100",
        "--trials",
        "4",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["trials"], 4);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 4);
    for (i, r) in reports.iter().enumerate() {
        assert_eq!(r["seed"], 100 + i as u64);
    }
    let rejected = v["rejected"].as_u64().unwrap();
    assert_eq!(out.status.code(), Some(if rejected > 0 { 1 } else { 0 }));
}

#[test]
fn shc_trace_deltas_sum_to_total() {
    let dir = TempDir::new().unwrap();
    let (h0, h) = gen(&dir, None, "8");
    let out = hamcert(&[
        "certify",
        "--method",
        "shc",
        "--h",
        s(&h),
        "--h0",
        s(&h0),
        "--m",
        "3",
        "--eps",
        "0.2",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let trace = v["trace"].as_array().unwrap();
    let queries: u64 = trace.iter().map(|c| c["queries"].as_u64().unwrap()).sum();
    let time: f64 = trace
        .iter()
        .map(|c| c["total_time"].as_f64().unwrap())
        .sum();
    assert_eq!(queries, v["queries"].as_u64().unwrap());
    assert!((time - v["total_time"].as_f64().unwrap()).abs() < 1e-9 * time);
}

#[test]
fn csv_subcommands() {
    let dir = TempDir::new().unwrap();
    let (h0, h) = gen(&dir, Some("0.3"), "9");
    let text = |args: &[&str]| {
        let out = hamcert(args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    };
    let bounds = text(&["analyze-bounds", "--n", "2", "--m", "3", "--trials", "20"]);
    let mut lines = bounds.lines();
    assert_eq!(lines.next(), Some("seed,n,m,S,t,lhs,rhs,holds"));
    assert!(lines.all(|l| l.ends_with(",true")));
    let samples = text(&[
        "sample",
        "--h",
        s(&h),
        "--h0",
        s(&h0),
        "--t",
        "0.5",
        "--group",
        "x",
        "--trials",
        "10",
    ]);
    assert_eq!(samples.lines().next(), Some("trial,theta,syndrome,Z"));
    assert_eq!(samples.lines().count(), 11);
    let tv = text(&["lowerbound", "--trials", "5", "--depth", "2"]);
    assert_eq!(tv.lines().next(), Some("instance,kind,time,tv,bound,holds"));
    assert!(tv.lines().skip(1).all(|l| l.ends_with(",true")));
    let scaling = text(&[
        "scaling", "--target", "shc", "--grid", "1,2,4", "--trials", "1",
    ]);
    assert_eq!(
        scaling.lines().next(),
        Some("grid_value,total_time,queries,measurements,accuracy")
    );
    assert_eq!(scaling.lines().count(), 4);
}
