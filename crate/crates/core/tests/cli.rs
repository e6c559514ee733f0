mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use symbb_core::cli::load_instance;

const SMALL6: &str = "6
1 1 1 0 0 0
1 1 1 0 0 0
1 1 1 0 0 0
0 0 0 0 0 0
0 0 0 0 0 0
0 0 0 0 0 0

0 4 7 2 5 1
4 0 3 6 2 8
7 3 0 1 4 2
2 6 1 0 9 3
5 2 4 9 0 6
1 8 2 3 6 0
";

fn symbb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symbb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn small6(dir: &Path) -> (PathBuf, i64) {
    let dat = dir.join("small6.dat");
    fs::write(&dat, SMALL6).unwrap();
    let json = dir.join("small6.json");
    let out = symbb(&["convert", "--instance", p(&dat), "--out", p(&json)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let inst = load_instance(&json).unwrap().inst;
    let (opt, _) = common::brute_force(&inst);
    (json, opt)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn convert_rejects_non_rank_one_flow() {
    let dir = tempfile::tempdir().unwrap();
    let dat = dir.path().join("bad.dat");
    fs::write(&dat, "3\n0 1 2\n1 0 1\n2 1 0\n0 1 1\n1 0 1\n1 1 0\n").unwrap();
    let out = symbb(&["convert", "--instance", p(&dat)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank-one"));
}

#[test]
fn solve_proves_optimum_and_refutes_above() {
    let dir = tempfile::tempdir().unwrap();
    let (json, opt) = small6(dir.path());
    let cert = dir.path().join("cert.json");
    let stats = dir.path().join("stats.csv");
    let t = opt.to_string();
    let out = symbb(&[
        "solve",
        "--instance",
        p(&json),
        "--target",
        &t,
        "--out",
        p(&cert),
        "--stats-csv",
        p(&stats),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = read_json(&cert);
    assert_eq!(v["certificate"]["outcome"]["kind"], "Proved");
    assert_eq!(v["complete"], true);
    assert_eq!(v["config"]["target"], opt);
    assert_eq!(v["instance_sha256"].as_str().unwrap().len(), 64);
    assert!(fs::read_to_string(&stats)
        .unwrap()
        .starts_with("# config: "));

    let t = (opt + 1).to_string();
    let out = symbb(&[
        "solve",
        "--instance",
        p(&json),
        "--target",
        &t,
        "--out",
        p(&cert),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = read_json(&cert);
    assert_eq!(v["certificate"]["outcome"]["kind"], "Refuted");
    assert_eq!(v["certificate"]["outcome"]["value"], opt);
}

#[test]
fn rerun_from_embedded_config_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (json, opt) = small6(dir.path());
    let first = dir.path().join("first.json");
    let t = opt.to_string();
    let out = symbb(&[
        "solve",
        "--instance",
        p(&json),
        "--target",
        &t,
        "--no-isomorphism-pruning",
        "--out",
        p(&first),
    ]);
    assert!(out.status.success());
    // the embedded config names `first.json` as output, so rerun elsewhere
    let mut cfg = read_json(&first)["config"].clone();
    let second = dir.path().join("second.json");
    cfg["outputs"]["out"] = Value::String(p(&second).into());
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = symbb(&["solve", "--config", p(&cfg_path)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut a = without_timings(read_json(&first));
    let mut b = without_timings(read_json(&second));
    a["config"]["outputs"]["out"] = Value::Null;
    b["config"]["outputs"]["out"] = Value::Null;
    assert_eq!(a, b);
    assert_eq!(b["config"]["iso_pruning"], false);
}

#[test]
fn config_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (json, opt) = small6(dir.path());
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, format!("{{\"target\": {}}}", opt + 1)).unwrap();
    let t = opt.to_string();
    let out = symbb(&[
        "solve",
        "--instance",
        p(&json),
        "--target",
        &t,
        "--config",
        p(&cfg),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_then_resume() {
    let dir = tempfile::tempdir().unwrap();
    let (json, opt) = small6(dir.path());
    let ck = dir.path().join("state.json");
    let cert = dir.path().join("cert.json");
    let t = opt.to_string();
    let out = symbb(&[
        "solve",
        "--instance",
        p(&json),
        "--target",
        &t,
        "--node-budget",
        "0",
        "--checkpoint",
        p(&ck),
        "--out",
        p(&cert),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(read_json(&cert)["complete"], false);
    assert_eq!(
        read_json(&cert)["certificate"]["outcome"]["kind"],
        "Inconclusive"
    );
    let out = symbb(&[
        "solve",
        "--instance",
        p(&json),
        "--target",
        &t,
        "--resume",
        p(&ck),
        "--out",
        p(&cert),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(read_json(&cert)["certificate"]["outcome"]["kind"], "Proved");
}

#[test]
fn resume_rejects_other_instance() {
    let dir = tempfile::tempdir().unwrap();
    let (json, opt) = small6(dir.path());
    let ck = dir.path().join("state.json");
    let t = opt.to_string();
    symbb(&[
        "solve",
        "--instance",
        p(&json),
        "--target",
        &t,
        "--node-budget",
        "0",
        "--checkpoint",
        p(&ck),
    ]);
    let other = dir.path().join("small6.dat");
    let out = symbb(&[
        "solve",
        "--instance",
        p(&other),
        "--target",
        &t,
        "--resume",
        p(&ck),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("different instance"));
}

#[test]
fn symmetry_bound_estimate_and_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let (json, opt) = small6(dir.path());
    let out = symbb(&[
        "symmetry",
        "--instance",
        p(&json),
        "--fix-one",
        "1",
        "--orbits-csv",
        p(&dir.path().join("o.csv")),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("group order: "));
    let csv = fs::read_to_string(dir.path().join("o.csv")).unwrap();
    assert!(csv
        .lines()
        .nth(2)
        .unwrap()
        .starts_with("orbit,members,size,score"));

    let b = dir.path().join("bound.json");
    let trace = dir.path().join("trace.csv");
    let out = symbb(&[
        "bound-root",
        "--instance",
        p(&json),
        "--out",
        p(&b),
        "--trace-csv",
        p(&trace),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lb = read_json(&b)["result"]["lower_bound"].as_i64().unwrap();
    let inst = load_instance(&json).unwrap().inst;
    let sub = symbb_core::subproblem::reduce(
        &inst,
        &symbb_core::subproblem::FixSets::new(6, vec![], vec![0]).unwrap(),
    );
    assert!(lb <= sub.exhaustive_optimum().unwrap().0);

    let e = dir.path().join("est.json");
    let t = opt.to_string();
    let out = symbb(&[
        "estimate",
        "--instance",
        p(&json),
        "--target",
        &t,
        "--seeds",
        "1,2,3",
        "--out",
        p(&e),
    ]);
    assert!(out.status.success());
    assert_eq!(
        read_json(&e)["result"]["reports"].as_array().unwrap().len(),
        3
    );

    let h = dir.path().join("hist.csv");
    let t = opt.to_string();
    let out = symbb(&[
        "sample-dist",
        "--instance",
        p(&json),
        "--optimum",
        &t,
        "--samples",
        "500",
        "--bins",
        "5",
        "--out",
        p(&h),
    ]);
    assert!(out.status.success());
    let total: u64 = fs::read_to_string(&h)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 500);
}

#[test]
fn missing_target_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (json, _) = small6(dir.path());
    let out = symbb(&["solve", "--instance", p(&json)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--target"));
}
