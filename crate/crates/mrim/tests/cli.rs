use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mrim(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mrim")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// Runs with `--report` into a temp dir and returns the parsed report.
fn report(args: &[&str]) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--quiet", "--report", path.to_str().unwrap()]);
    let (code, _, err) = mrim(&all);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn labels(v: &Value) -> Vec<Vec<String>> {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn star_within_round_picks_hub_then_isolated_node() {
    let star = fixture("star.txt");
    for extra in [&["--evaluator", "mc"][..], &["--evaluator", "exact", "--lazy"], &["--algo", "imm"]] {
        let mut args = vec!["mrim", "--graph", star.to_str().unwrap(), "--rounds", "2", "--budget", "1", "--seed", "11"];
        args.extend_from_slice(extra);
        let r = report(&args);
        assert_eq!(labels(&r["result"]["schedule"]), vec![vec!["a"], vec!["d"]], "{extra:?}");
        assert!((r["result"]["spread"]["mean"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    }
    let r = report(&["mrim", "--graph", star.to_str().unwrap(), "--rounds", "2", "--k", "1", "--mode", "cross", "--seed", "2"]);
    assert_eq!(r["algorithm"], "global-greedy");
    assert!((r["result"]["spread"]["mean"].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

fn closed_form(q: &[f64]) -> (f64, f64) {
    (q[0] * (2.0 - 0.75 * q[1]), q[1] * (1.0 - q[0] / 4.0))
}

#[test]
fn pim_on_single_edge_matches_closed_form_argmax() {
    let uv = fixture("uv.txt");
    let mut decided = 0;
    for seed in 1..=12u64 {
        let s = seed.to_string();
        let r = report(&[
            "saic", "--graph", uv.to_str().unwrap(), "--problem", "pim", "--k", "1", "--q-case", "0", "--q-base", "2",
            "--seed", &s,
        ]);
        let q: Vec<f64> = serde_json::from_value(r["result"]["q"].clone()).unwrap();
        let (ru, rv) = closed_form(&q);
        let seeds: Vec<String> = serde_json::from_value(r["result"]["seeds"].clone()).unwrap();
        // estimates from a few hundred samples; only clear gaps are decisive
        if (ru - rv).abs() > 0.2 {
            let want = if ru > rv { "u" } else { "v" };
            assert_eq!(seeds, vec![want.to_string()], "seed {seed}, q = {q:?}");
            decided += 1;
        }
        let spread = r["result"]["spread"]["mean"].as_f64().unwrap();
        let exact = if seeds[0] == "u" { ru } else { rv };
        assert!((spread - exact).abs() < 0.05, "seed {seed}: {spread} vs {exact}");
    }
    assert!(decided >= 6, "only {decided} decisive draws");
}

#[test]
fn pim_with_everyone_self_activated_profile() {
    let r = report(&[
        "saic", "--graph", fixture("uv.txt").to_str().unwrap(), "--problem", "pim", "--k", "1", "--profile",
        fixture("all_active.profile").to_str().unwrap(), "--seed", "9",
    ]);
    assert_eq!(r["result"]["seeds"], serde_json::json!(["u"]));
    let (ru, rv) = closed_form(&[1.0, 1.0]);
    assert_eq!((ru, rv), (1.25, 0.75));
    let est: Vec<f64> = serde_json::from_value(r["result"]["single_node_estimates"].clone()).unwrap();
    assert!((est[0] - ru).abs() < 0.15 && (est[1] - rv).abs() < 0.15, "{est:?}");
    assert!((r["result"]["spread"]["mean"].as_f64().unwrap() - ru).abs() < 0.03);
}

#[test]
fn empty_schedule_evaluates_to_zero() {
    for evaluator in ["mc", "exact"] {
        let r = report(&[
            "eval", "--graph", fixture("star.txt").to_str().unwrap(), "--schedule",
            fixture("empty.schedule").to_str().unwrap(), "--evaluator", evaluator, "--seed", "1",
        ]);
        assert_eq!(r["result"]["spread"]["mean"].as_f64(), Some(0.0));
    }
}

#[test]
fn eval_and_oracle_agree_on_star_schedule() {
    let star = fixture("star.txt");
    let sched = fixture("star.schedule");
    let mc = report(&["eval", "--graph", star.to_str().unwrap(), "--schedule", sched.to_str().unwrap(), "--seed", "1"]);
    let ex = report(&["oracle", "rho", "--graph", star.to_str().unwrap(), "--schedule", sched.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(mc["result"]["spread"]["mean"].as_f64(), Some(4.0));
    assert_eq!(ex["result"]["value"].as_f64(), Some(4.0));
    let opt = report(&[
        "oracle", "opt", "--graph", star.to_str().unwrap(), "--problem", "mrim-within", "--rounds", "2", "--budget", "1",
        "--seed", "1",
    ]);
    assert_eq!(opt["result"]["value"].as_f64(), Some(4.0));
}

#[test]
fn reports_are_deterministic_given_a_seed() {
    let star = fixture("star.txt");
    let run = |threads: &str| {
        let mut r = report(&[
            "adaptive", "--graph", star.to_str().unwrap(), "--rounds", "2", "--budget", "1", "--trials", "30", "--seed",
            "77", "--threads", threads, "--weighted-cascade",
        ]);
        r.as_object_mut().unwrap().remove("wall_time_ms");
        r
    };
    assert_eq!(run("1"), run("4"));
    let fresh = report(&["eval", "--graph", star.to_str().unwrap(), "--schedule", fixture("star.schedule").to_str().unwrap()]);
    assert!(fresh["seed"].is_u64(), "a fresh seed is recorded");
}

#[test]
fn adaptive_trace_lines_are_cumulative() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let (code, _, err) = mrim(&[
        "adaptive", "--graph", fixture("star.txt").to_str().unwrap(), "--rounds", "2", "--k", "1", "--trials", "3",
        "--seed", "5", "--quiet", "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&trace).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 6);
    for pair in recs.chunks(2) {
        assert_eq!(pair[0]["round"], 1);
        assert_eq!(pair[1]["cumulative"], 4);
    }
}

#[test]
fn exit_codes() {
    let star = fixture("star.txt");
    let star = star.to_str().unwrap();
    assert_eq!(mrim(&["mrim", "--graph", star]).0, 2, "missing required flags");
    assert_eq!(mrim(&["saic", "--graph", star, "--problem", "pim", "--k", "1", "--q", "0.5", "--q-case", "1"]).0, 2);
    assert_eq!(mrim(&["mrim", "--graph", star, "--rounds", "2", "--budget", "5", "--quiet"]).0, 4);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "a b 0.5\n# fine\na c 1.7\n").unwrap();
    let (code, _, err) = mrim(&["eval", "--graph", bad.to_str().unwrap(), "--schedule", "x", "--quiet"]);
    assert_eq!(code, 3);
    assert!(err.contains("line 3"), "{err}");

    let sched = dir.path().join("s.txt");
    std::fs::write(&sched, "a\nzz\n").unwrap();
    let (code, _, err) = mrim(&["eval", "--graph", star, "--schedule", sched.to_str().unwrap(), "--quiet"]);
    assert_eq!(code, 3);
    assert!(err.contains("line 2") && err.contains("zz"), "{err}");

    let ring = dir.path().join("ring.txt");
    let edges: String = (0..24).map(|i| format!("n{i} n{} 0.5\n", (i + 1) % 24)).collect();
    std::fs::write(&ring, edges).unwrap();
    let ring = ring.to_str().unwrap();
    assert_eq!(mrim(&["oracle", "sigma", "--graph", ring, "--seeds", "n0", "--quiet"]).0, 5);
    assert_eq!(
        mrim(&["oracle", "opt", "--graph", ring, "--problem", "pim", "--budget", "8", "--q", "0.1", "--quiet"]).0,
        5
    );
}

#[test]
fn console_summary_lists_the_schedule() {
    let (code, out, _) = mrim(&[
        "mrim", "--graph", fixture("star.txt").to_str().unwrap(), "--rounds", "2", "--budget", "1", "--seed", "3",
        "--mc-samples", "50",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("schedule") && out.contains("[[\"a\"],[\"d\"]]"), "{out}");
}

#[test]
fn schedule_and_store_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("out.schedule");
    let store = dir.path().join("rr.bin");
    let (code, _, err) = mrim(&[
        "mrim", "--graph", fixture("star.txt").to_str().unwrap(), "--rounds", "2", "--budget", "1", "--algo", "imm",
        "--seed", "3", "--quiet", "--write-schedule", sched.to_str().unwrap(), "--dump-store", store.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(std::fs::read_to_string(&sched).unwrap(), "a\nd\n");
    let loaded = mrim::store_io::read_store(std::fs::File::open(&store).unwrap()).unwrap();
    let mrim::store_io::AnyStore::Sequences(s) = loaded else {
        panic!("expected a sequence store")
    };
    assert_eq!(s.rounds(), 2);
    assert!(!s.is_empty() && s.index_consistent());
}
