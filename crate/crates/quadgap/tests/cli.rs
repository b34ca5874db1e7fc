//! End-to-end runs of the binary and its exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadgap"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("QUADGAP_THREADS", "2").output().expect("spawn quadgap")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quadgap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn field_info_gauss() {
    let o = run(&["field-info", "--d", "-1"]);
    assert_eq!(code(&o), 0);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("disc=-4") && s.contains("|U|=4") && s.contains("h=1"), "{s}");
}

#[test]
fn field_info_rejects_bad_d() {
    assert_eq!(code(&run(&["field-info", "--d", "-4"])), 64);
    assert_eq!(code(&run(&["field-info", "--d", "5"])), 64);
}

#[test]
fn usage_errors_exit_64_and_help_exits_0() {
    assert_eq!(code(&run(&["--no-such-flag"])), 64);
    assert_eq!(code(&run(&["gaps", "--d", "-1"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["gaps", "--help"])), 0);
}

#[test]
fn gaps_writes_record() {
    let out = tmp("g.json");
    let o = run(&["gaps", "--d", "-1", "--X", "1000", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    assert_eq!(v["radius"], 5);
    assert_eq!(v["verified"], true);
    assert_eq!(v["config"]["command"], "gaps");
    assert_eq!(v["bigint"], "decimal-string");
}

#[test]
fn gaps_budget_exit_3() {
    let o = run(&["gaps", "--d", "-1", "--X", "5000", "--max-X", "1000"]);
    assert_eq!(code(&o), 3);
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["status"], "budget");
}

#[test]
fn gaps_growth_csv() {
    let csv = tmp("growth.csv");
    let o = run(&["gaps", "--d", "-1", "--X", "100,1000", "--csv", csv.to_str().unwrap(), "--comparator", "log"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let (h, rows) = quadgap::csvout::read_table(&text).unwrap();
    assert_eq!(h, ["x", "achieved", "comparator", "ratio"]);
    assert_eq!(rows.len(), 2);
    assert!(text.lines().next().unwrap().starts_with('#'));
}

#[test]
fn cover_verify_roundtrip_and_tamper() {
    let out = tmp("c.json");
    let o = run(&["cover", "--d", "-1", "--x", "30", "--strategy", "trivial", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(&["verify", out.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["cover", "verify", out.to_str().unwrap()])), 0);

    let mut v = read_json(&out);
    v["center"][0] = Value::from(v["center"][0].as_i64().unwrap() + 1);
    let bad = tmp("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["status"], "verify-failed");

    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&run(&["verify", bad.to_str().unwrap()])), 2);
}

#[test]
fn cover_incomplete_exit_2() {
    let o = run(&["cover", "--d", "-1", "--x", "20", "--strategy", "random", "--seed", "1"]);
    assert_eq!(code(&o), 2);
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["status"], "cover-incomplete");
    assert!(diag["details"]["leftover_count"].as_u64().unwrap() > 0);
}

#[test]
fn cover_partial_certifies() {
    let out = tmp("p.json");
    let o = run(&[
        "cover", "--d", "-1", "--x", "40", "--strategy", "greedy", "--allow-partial", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    assert_eq!(v["plan"]["complete"], false);
    assert!(v["radius"].as_u64().unwrap() >= 1);
    assert_eq!(code(&run(&["verify", out.to_str().unwrap()])), 0);
}

#[test]
fn smooth_grid_csv() {
    let o = run(&["smooth", "--d", "-1", "--x", "10000", "--grid"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = quadgap::csvout::read_table(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(h, ["x", "y", "u", "count", "envelope", "ratio"]);
    assert_eq!(rows.len(), 12);
}

#[test]
fn weights_commands() {
    let o = run(&["weights", "mk", "--k", "2,3", "--samples", "100000"]);
    assert_eq!(code(&o), 0);
    let (_, rows) = quadgap::csvout::read_table(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);

    let o = run(&["weights", "sumw", "--d", "-1", "--k", "2", "--N", "2000", "--z", "3", "--R", "18"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["sum_w"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["admissible"], true);
}

#[test]
fn randsel_report() {
    for stage in ["greedy", "weighted"] {
        let o = run(&["randsel", "--d", "-1", "--x", "1000", "--trials", "8", "--second-stage", stage]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["second_stage"], stage);
        assert_eq!(v["survivors"].as_array().unwrap().len(), 8);
        assert!(v["sigma"].as_f64().unwrap() > 0.0);
        assert!(!v["leftovers"].as_array().unwrap().is_empty());
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let one = bin().args(["gaps", "--d", "-2", "--X", "3000"]).env("QUADGAP_THREADS", "1").output().unwrap();
    let four = bin().args(["gaps", "--d", "-2", "--X", "3000"]).env("QUADGAP_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn sieve_counts() {
    let o = run(&["sieve", "--d", "-1", "--hi", "100"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    // primes up to norm 100 in Z[i]: (1+i), 3, 7, and two above each p = 1 mod 4 below 100
    assert_eq!(v["prime_ideals"], 1 + 2 + 2 * 11);
    assert_eq!(v["prime_elements"].as_u64().unwrap(), 4 * (1 + 2 + 2 * 11));
}
