//! Runs the `mlcount` binary on the files in `tests/data`.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn mlcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlcount"))
        .args(args)
        .env_remove("MLCOUNT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_general_and_oracle_agree() {
    let p = data("first_q2_zero.json");
    let general = mlcount(&["count", "--problem", &p, "--method", "general"]);
    assert!(general.status.success());
    assert_eq!(stdout(&general).trim(), "112");
    let oracle = mlcount(&["count", "--problem", &p, "--method", "oracle", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&oracle.stdout).unwrap();
    assert_eq!(v["count"], "112");
    assert_eq!(v["method"], "oracle");
    assert!(v["timing"]["elapsed_ns"].is_u64());
}

#[test]
fn count_reports_route_and_is_thread_independent() {
    let p = data("second_q3_one.json");
    let one = mlcount(&["count", "--problem", &p, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["count"], "918");
    assert_eq!(v["method"], "general-factor");
    let four = Command::new(env!("CARGO_BIN_EXE_mlcount"))
        .args(["count", "--problem", &p])
        .env("MLCOUNT_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(stdout(&four).trim(), "918");
}

#[test]
fn exit_codes() {
    let rank = mlcount(&["count", "--problem", &data("rank_deficient.json"), "--method", "general"]);
    assert_eq!(rank.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&rank.stderr).unwrap();
    assert_eq!(err["error"], "rank");

    // brute force does not need full rank
    let oracle = mlcount(&["count", "--problem", &data("rank_deficient.json"), "--method", "oracle"]);
    assert!(oracle.status.success());

    let big = data("too_big_for_oracle.json");
    assert_eq!(mlcount(&["count", "--problem", &big, "--method", "oracle"]).status.code(), Some(4));
    assert!(mlcount(&["count", "--problem", &big]).status.success());

    let schema = mlcount(&["count", "--problem", &data("bad_schema.json")]);
    assert_eq!(schema.status.code(), Some(2));
    assert_eq!(mlcount(&["count", "--problem", &data("missing.json")]).status.code(), Some(2));
    let shape = mlcount(&["count", "--problem", &data("first_q2_zero.json"), "--method", "special"]);
    assert_eq!(shape.status.code(), Some(3));

    let hier = mlcount(&["weights", "--code", &data("code_large.json"), "--hierarchy"]);
    assert_eq!(hier.status.code(), Some(5));
}

#[test]
fn weights_reports() {
    let small = mlcount(&["weights", "--code", &data("code_two_singletons.json"), "--hierarchy"]);
    assert_eq!(stdout(&small), "length: 4\ndimension: 2\nd: 2 3\n");
    let first = mlcount(&["weights", "--code", &data("code_first_q2.json"), "--min-distance", "--word", "0,0,0"]);
    assert_eq!(stdout(&first), "length: 128\ndimension: 3\nmin_distance: 16\nweight: 0\n");
    let bad = mlcount(&["weights", "--code", &data("code_first_q2.json"), "--word", "1,2,0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bench_writes_csv() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let csv = dir.join("cli_bench.csv");
    let out = mlcount(&[
        "bench",
        "--problem",
        &data("first_q2_zero.json"),
        "--repeat",
        "3",
        "--csv",
        &csv.display().to_string(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("problem,method,count,ns,median_ns,speedup"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[0] == "first_q2_zero" && r[2] == "112"));
    assert!(rows.iter().any(|r| r[1] == "oracle"));

    let skip = mlcount(&["bench", "--problem", &data("first_q2_zero.json"), "--repeat", "1", "--skip-oracle"]);
    assert!(skip.status.success());
    assert!(!stdout(&skip).contains("oracle"));
}

#[test]
fn selftest_is_seeded() {
    let args = ["selftest", "--max-bits", "10", "--cases", "16", "--seed", "9"];
    let a = mlcount(&args);
    let b = mlcount(&args);
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("conservation"));
}
