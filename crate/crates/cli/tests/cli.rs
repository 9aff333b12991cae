use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn facloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_facloc")).args(args).output().expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn read_json(p: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn torus_certify_from_odd_start() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "torus.json");
    let report = path(&dir, "cert.json");
    assert_eq!(code(&facloc(&["gen", "--torus", "--N", "4", "--p", "1", "--out", &inst])), 0);
    let out = facloc(&["certify", "--in", &inst, "--t", "1", "--initial", "odd", "--out", &report]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&report);
    let res = &r["results"];
    assert_eq!(res["termination"], "LOCAL_OPT");
    assert_eq!(res["local_opt"]["is_local_opt"], true);
    assert!((res["ratio"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(res["bound"].as_f64().unwrap(), 5.0);
    assert_eq!(res["verdict"], true);
    assert_eq!(res["reference_source"], "oracle");
    assert!(r["instance_digest"].as_str().unwrap().starts_with("sha256:"));
    assert!(r.get("wall_ms").is_none());
}

#[test]
fn solve_twice_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "rand.json");
    assert_eq!(code(&facloc(&["gen", "--seed", "11", "--n", "9", "--problem", "kmedian", "--k", "2", "--out", &inst])), 0);
    let args = ["solve", "--in", &inst, "--problem", "kmedian", "--k", "2", "--t", "1", "--eps", "0"];
    let a = facloc(&args);
    let b = facloc(&args);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_replays_from_its_config() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "rand.json");
    let first = path(&dir, "first.json");
    let second = path(&dir, "second.json");
    facloc(&["gen", "--seed", "5", "--n", "8", "--mode", "graph", "--problem", "lp", "--k", "3", "--p", "2", "--out", &inst]);
    assert_eq!(code(&facloc(&["solve", "--in", &inst, "--seed", "9", "--t", "2", "--out", &first])), 0);
    let cfg = read_json(&first)["config"].clone();
    let s = &cfg["search"];
    let replay = [
        "solve".to_string(),
        "--in".into(),
        cfg["input"].as_str().unwrap().into(),
        "--problem".into(),
        cfg["problem"].as_str().unwrap().into(),
        "--k".into(),
        cfg["k"].to_string(),
        "--p".into(),
        cfg["p"].to_string(),
        "--t".into(),
        s["t"].to_string(),
        "--eps".into(),
        s["epsilon"].to_string(),
        "--seed".into(),
        s["seed"].to_string(),
        "--max-iters".into(),
        s["max_iters"].to_string(),
        "--initial".into(),
        cfg["initial"].as_str().unwrap().into(),
        "--out".into(),
        second.clone(),
    ];
    let replay: Vec<&str> = replay.iter().map(String::as_str).collect();
    assert_eq!(code(&facloc(&replay)), 0);
    assert_eq!(read_json(&first)["results"], read_json(&second)["results"]);
    assert_eq!(read_json(&first)["instance_digest"], read_json(&second)["instance_digest"]);
}

#[test]
fn lp_bench_stays_under_nine() {
    let dir = TempDir::new().unwrap();
    let csv_path = path(&dir, "bench.csv");
    let report = path(&dir, "bench.json");
    let out = facloc(&["bench", "--problem", "lp", "--p", "2", "--runs", "100", "--n", "8", "--k", "2", "--out", &csv_path, "--report", &report]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut rd = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header, ["seed", "n", "k", "p", "t", "alg_cost", "opt_cost", "ratio", "bound", "iters", "wall_ms"]);
    let ratio_col = header.iter().position(|h| h == "ratio").unwrap();
    let ratios: Vec<f64> = rd.records().map(|r| r.unwrap()[ratio_col].parse().unwrap()).collect();
    assert_eq!(ratios.len(), 100);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(max <= 9.0, "max ratio {max}");
    assert!(ratios.iter().all(|&r| r >= 1.0 - 1e-12));
    let rep = read_json(&report);
    assert_eq!(rep["results"]["all_within_bound"], true);
    assert_eq!(rep["results"]["max_ratio"].as_f64().unwrap(), max);
}

#[test]
fn bench_rows_do_not_depend_on_thread_scheduling() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.csv");
    let b = path(&dir, "b.csv");
    for p in [&a, &b] {
        assert_eq!(code(&facloc(&["bench", "--problem", "kufl", "--runs", "20", "--n", "7", "--k", "3", "--seed", "40", "--out", p])), 0);
    }
    let strip = |p: &str| -> Vec<String> {
        std::fs::read_to_string(p).unwrap().lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn oracle_reports_optimum() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "line.json");
    std::fs::write(&inst, r#"{"n":4,"points":[[0],[1],[2],[3]],"k":2,"problem":"kmedian"}"#).unwrap();
    let out = facloc(&["oracle", "--in", &inst]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["results"]["solution"]["cost"].as_f64().unwrap(), 2.0);
}

#[test]
fn reference_file_replaces_oracle() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "line.json");
    let reference = path(&dir, "ref.json");
    std::fs::write(&inst, r#"{"n":6,"points":[[0],[1],[2],[10],[11],[12]],"k":2,"problem":"kmedian"}"#).unwrap();
    std::fs::write(&reference, "[0, 3]").unwrap();
    let out = facloc(&["certify", "--in", &inst, "--reference", &reference]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["results"]["reference_source"], reference.as_str());
    assert_eq!(r["results"]["reference"]["open"], serde_json::json!([0, 3]));
    assert_eq!(r["config"]["reference"], reference.as_str());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    // usage
    assert_eq!(code(&facloc(&["frobnicate"])), 1);
    assert_eq!(code(&facloc(&["solve", "--t", "many"])), 1);
    assert_eq!(code(&facloc(&["gen", "--torus"])), 1);
    assert_eq!(code(&facloc(&["--help"])), 0);
    assert_eq!(code(&facloc(&["--version"])), 0);

    // input
    let missing = path(&dir, "missing.json");
    assert_eq!(code(&facloc(&["solve", "--in", &missing])), 2);
    let garbage = path(&dir, "garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(code(&facloc(&["solve", "--in", &garbage])), 2);
    assert_eq!(code(&facloc(&["gen", "--torus", "--N", "3"])), 2);
    let small = path(&dir, "small.json");
    facloc(&["gen", "--n", "6", "--k", "2", "--out", &small]);
    assert_eq!(code(&facloc(&["solve", "--in", &small, "--initial", "odd"])), 2);
    assert_eq!(code(&facloc(&["solve", "--in", &small, "--t", "0"])), 2);

    // guard
    let big = path(&dir, "big.json");
    facloc(&["gen", "--n", "40", "--k", "20", "--out", &big]);
    assert_eq!(code(&facloc(&["oracle", "--in", &big])), 3);
    assert_eq!(code(&facloc(&["certify", "--in", &big])), 3);

    // certificate failure: stopped after one move, far from a local optimum
    let line = path(&dir, "line.json");
    let start = path(&dir, "start.json");
    std::fs::write(&line, r#"{"n":9,"points":[[0],[1],[2],[100],[101],[102],[200],[201],[202]],"k":3,"problem":"kmedian"}"#).unwrap();
    std::fs::write(&start, "[0, 1, 2]").unwrap();
    let report = path(&dir, "fail.json");
    let out = facloc(&["certify", "--in", &line, "--initial", &start, "--max-iters", "1", "--out", &report]);
    assert_eq!(code(&out), 4);
    let r = read_json(&report);
    assert_eq!(r["results"]["termination"], "ITER_CAP");
    assert_eq!(r["results"]["verdict"], false);
}

#[test]
fn trace_and_timing_outputs() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "rand.json");
    let trace = path(&dir, "trace.jsonl");
    facloc(&["gen", "--seed", "2", "--n", "10", "--problem", "ufl", "--out", &inst]);
    let out = facloc(&["solve", "--in", &inst, "--trace", &trace, "--timing"]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["wall_ms"].as_f64().unwrap() >= 0.0);
    let lines: Vec<Value> = std::fs::read_to_string(&trace).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len() as u64, r["results"]["iterations"].as_u64().unwrap());
    let mut prev = r["results"]["initial_objective"].as_f64().unwrap();
    for l in &lines {
        let cost = l["cost"].as_f64().unwrap();
        assert!(cost < prev);
        prev = cost;
    }
    assert!(Path::new(&trace).exists());
}
