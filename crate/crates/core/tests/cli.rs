use std::path::PathBuf;
use std::process::{Command, Output};

use secmatch_core::bench::{read_csv_report, report::CSV_HEADER};

fn secmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secmatch"))
        .args(args)
        .env("SECMATCH_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("secmatch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn simulate_prints_one_deterministic_csv_row() {
    let args = ["simulate", "--n", "8", "--trials", "50", "--seed", "3"];
    let a = secmatch(&args);
    let b = secmatch(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER.join(","));
    assert!(lines[1].starts_with("vertex,uniform-complete,8,28,2,4,50,3,"));
}

#[test]
fn threshold_table_and_sweep() {
    let o = secmatch(&["analyze", "threshold", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,l,value\n"));
    assert!(text.contains("6,3,0.4666666666666667\n6,4,0.4666666666666667\n"));

    let o = secmatch(&["analyze", "sweep", "--n", "10,11"]);
    let text = stdout(&o);
    assert!(text.starts_with("n,l_star,value,gap\n10,5;6,0.4444444444444444,"));
}

#[test]
fn graph_trace_lists_pairs_and_steps() {
    let g = temp("k4.json");
    std::fs::write(&g, r#"{"n":4,"edges":[[0,1,10],[2,3,10],[0,2,1]]}"#).unwrap();
    let o = secmatch(&[
        "simulate",
        "--graph",
        g.to_str().unwrap(),
        "--seed",
        "1",
        "--k",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["matching"], serde_json::json!([[0, 1], [2, 3]]));
    assert_eq!(v["steps"].as_array().unwrap().len(), 3);
}

#[test]
fn report_writes_a_row_per_size() {
    let out = temp("report.csv");
    let o = secmatch(&[
        "report",
        "--sizes",
        "6,8",
        "--trials",
        "20",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv_report(&out).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![6, 8]);
    assert!(rows
        .iter()
        .all(|r| r.ci_lo <= r.mean_ratio && r.mean_ratio <= r.ci_hi));
}

#[test]
fn verify_suite_passes() {
    let o = secmatch(&["verify", "--suite", "graph", "--suite", "ordinal"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let (checks, summary) = text.trim_end().rsplit_once('\n').unwrap();
    assert!(checks.lines().count() >= 2);
    assert!(checks.lines().all(|l| l.starts_with("PASS ")), "{text}");
    assert!(summary.ends_with(" 0 failed"));
}

#[test]
fn bad_input_exits_with_one() {
    for args in [
        vec!["simulate", "--family", "bogus"],
        vec!["verify", "--suite", "nope"],
        vec!["analyze", "p", "--k", "5", "--t-max", "2"],
        vec!["simulate", "--graph", "/nonexistent/graph.json"],
        vec!["frobnicate"],
    ] {
        let o = secmatch(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn policy_outside_unit_interval_is_rejected() {
    let p = temp("policy.json");
    std::fs::write(&p, r#"{"n":3,"c":[0,0.5,1.5]}"#).unwrap();
    let o = secmatch(&["analyze", "policy", "--policy", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(secmatch(&["--help"]).status.code(), Some(0));
}
