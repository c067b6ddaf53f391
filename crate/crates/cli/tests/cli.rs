use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn schreier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schreier")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = schreier(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn build_cycle_prints_sgf() {
    let out = schreier(&["build", "cycle:6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("SGF1\n"));
    assert!(text.contains("vertices 6 root 0"));
    assert_eq!(text.lines().filter(|l| l.starts_with("e ")).count(), 12);
}

#[test]
fn built_graph_reads_back() {
    let path = scratch("petersen.sgf");
    let out = schreier(&["build", "petersen", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let spec = format!("file:{}", path.display());
    let r = report(&["ramanujan", "--graph", &spec]);
    assert!((r["result"]["rho0"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-11);
}

#[test]
fn ramanujan_petersen() {
    let r = report(&["ramanujan", "--graph", "petersen"]);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["command"], "ramanujan");
    assert_eq!(r["config"]["command"]["graph"], "petersen");
    let res = &r["result"];
    assert!((res["rho0"].as_f64().unwrap() - 0.666666666667).abs() < 1e-12);
    assert!((res["threshold"].as_f64().unwrap() - 0.942809041582).abs() < 1e-12);
    assert_eq!(res["verdict"], true);
    assert!(r["timestamp"]["unix_seconds"].is_u64());
}

#[test]
fn triv2_on_free_group() {
    let r = report(&["lemma-check", "triv2", "--group", "F2", "--n", "6"]);
    assert_eq!(r["holds"], true);
    assert_eq!(r["result"]["returning_words"], "232");
    assert_eq!(r["result"]["closed_under_rotation"], true);
}

#[test]
fn lemma_checks_hold() {
    let cases: &[&[&str]] = &[
        &["lemma-check", "different", "--group", "petersen", "--max-n", "8"],
        &["lemma-check", "returningvsrw", "--group", "F2", "--n", "4"],
        &["lemma-check", "triv1", "--group", "F2", "--n", "7"],
        &["lemma-check", "modifiedrw", "--sequences", "5"],
        &["lemma-check", "subgroupnorm", "--support", "x,y"],
        &["lemma-check", "lekv", "--action", "randperm:m=2,n=60,seed=3", "--radius", "1"],
    ];
    for args in cases {
        let r = report(args);
        assert_eq!(r["holds"], true, "{args:?}");
    }
}

#[test]
fn failed_assertion_exits_two() {
    // Any nonzero floating-point gap fails a zero tolerance.
    let out = schreier(&["lemma-check", "subgroupnorm", "--support", "x,y", "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["holds"], false);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["build", "nonsense:3"][..],
        &["spectrum", "--graph", "free:m=2"],
        &["frobnicate"],
        &["experiment", "kesten-amenable", "--tolerance", "-1"],
    ] {
        let out = schreier(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn rationals_and_rounding() {
    let r = report(&["walks", "--graph", "cycle:6", "--length", "4", "--to", "3"]);
    assert_eq!(r["result"]["returns"], "6");
    assert_eq!(r["result"]["return_probability"]["num"], "3");
    assert_eq!(r["result"]["return_probability"]["den"], "8");
    assert_eq!(r["result"]["to"]["count"], "5");
    let s = report(&["spectrum", "--graph", "k4"]);
    let ev: Vec<f64> = s["result"]["eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(ev, [1.0, -0.333333333333, -0.333333333333, -0.333333333333]);
}

#[test]
fn config_file_supplies_defaults() {
    let path = scratch("triv.conf");
    std::fs::write(&path, "# defaults\nn = 4\nmax-prefix = 1\n").unwrap();
    let p = path.to_str().unwrap();
    let r = report(&["--config", p, "lemma-check", "returningvsrw"]);
    assert_eq!(r["config"]["command"]["n"], 4);
    assert_eq!(r["config"]["command"]["max_prefix"], 1);
    let r = report(&["--config", p, "lemma-check", "returningvsrw", "--n", "6"]);
    assert_eq!(r["config"]["command"]["n"], 6);
}

#[test]
fn reports_reproduce_without_timestamp() {
    let args = ["irs-sample", "--action", "randperm:m=2,n=80,seed=4", "--count", "3000", "--seed", "9", "--summary"];
    let mut a = report(&args);
    let mut b = report(&["--threads", "1", "irs-sample", "--action", "randperm:m=2,n=80,seed=4", "--count", "3000", "--seed", "9", "--summary"]);
    for r in [&mut a, &mut b] {
        r.as_object_mut().unwrap().remove("timestamp");
        r["config"].as_object_mut().unwrap().remove("threads");
        r["config"].as_object_mut().unwrap().remove("threads_effective");
        r["result"]["provenance"].as_object_mut().unwrap().remove("threads");
    }
    assert_eq!(a, b);
    assert_eq!(a["result"]["provenance"]["seed"], 9);
}

#[test]
fn exact_irs_is_invariant() {
    let r = report(&["irs-sample", "--action", "s3", "--exact", "--radius", "3"]);
    assert_eq!(r["result"]["invariance"]["exactly_invariant"], true);
    assert!(r["result"]["ensemble"]["graphs"][0].as_str().unwrap().starts_with("SGF1"));
}

#[test]
fn cover_chain_estimate() {
    let r = report(&["rho-estimate", "--graph", "free:m=2", "--horizon", "200"]);
    let lb = r["result"]["lower_bound"].as_f64().unwrap();
    assert!((lb - 0.83860548243).abs() < 1e-10);
    assert_eq!(r["result"]["monotone_exact"], true);
}

#[test]
fn kesten_experiments() {
    let r = report(&["experiment", "kesten-amenable", "--horizon", "200"]);
    assert!(r["result"]["gap"].as_f64().unwrap() <= 0.02);
    assert_eq!(r["result"]["within_tolerance"], true);
    let r = report(&["experiment", "kesten-finite-irs", "--action", "randperm:m=2,n=50,seed=2"]);
    assert_eq!(r["result"]["strict"], true);
    let r = report(&["experiment", "nonamenable-subgroup-counterexample"]);
    assert_eq!(r["result"]["schreier_bound_exceeds_tree_rho"], true);
}

#[test]
fn local_statistics_commands() {
    let r = report(&["ball-distance", "--graph", "cycle:8", "--other", "cycle:9"]);
    assert_eq!(r["result"]["agree_up_to"], 3);
    let r = report(&["fix-density", "--action", "cycle:6", "--word", "t^3"]);
    assert_eq!(r["result"]["rows"][0]["density"]["num"], "0");
    let r = report(&["fix-density", "--action", "cycle:6", "--word", "t^6"]);
    assert_eq!(r["result"]["rows"][0]["density"]["num"], "1");
    assert_eq!(r["result"]["rows"][0]["density"]["den"], "1");
    let r = report(&["bs-stats", "--graph", "cycle:9", "--radius", "2"]);
    assert_eq!(r["result"]["class_count"], 1);
    let r = report(&["cycles", "--graph", "petersen", "--max-len", "6"]);
    assert_eq!(r["result"]["profiles"][0]["girth"], 5);
    assert_eq!(r["result"]["profiles"][0]["counts"][4], 12);
}
