use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framecomplex")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn vas0_orbit_is_the_whole_level() {
    let out = run(&["verify", "--theorem", "vas0", "--ring", "2", "--n", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"], "pass");
    assert_eq!(v["result"][0]["details"][0], "IU level 1: orbit 15/15");
    assert_eq!(v["config"]["seed"], 0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn link_spheres_for_iu4() {
    let out = run(&["verify", "--theorem", "maazen1", "--ring", "2", "--n", "2", "--format", "tsv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("links are S^-1"));
    assert!(text.contains("links are S^0"));
}

#[test]
fn iu6_has_vanishing_reduced_h0() {
    let out = run(&["homology", "--family", "IU", "--ring", "2", "--n", "3", "--max-degree", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let groups = v["result"]["groups"].as_array().unwrap();
    let h0 = groups.iter().find(|g| g["degree"] == 0).unwrap();
    assert_eq!(h0["free_rank"], 0);
    assert_eq!(h0["torsion"].as_array().unwrap().len(), 0);
    assert_eq!(v["result"]["method"], "snf");
}

#[test]
fn bound_rows_as_tsv() {
    let out = run(&["verify", "--theorem", "b-w1", "--n", "3", "--format", "tsv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family\tring\tn\tk\tbound\tverified_through\tmethod\truntime_ms");
    assert_eq!(lines[1], "IU\tZ/2\t3\t0\t0\t0\tcomponents\t-");
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(run(&["verify", "--theorem", "nope"]).status.code(), Some(3));
    assert_eq!(run(&["verify", "--theorem", "vas0"]).status.code(), Some(3));
    assert_eq!(run(&["orbit", "--n", "2", "--ring", "1"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["enumerate", "--n", "2", "--primes", "4"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn violated_hypotheses_exit_two() {
    let out = run(&["verify", "--theorem", "h-n", "--instance", "hexagon", "--max-degree", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["outcome"], "hypothesis-violation");
    let surj = run(&["verify", "--theorem", "surj", "--instance", "circle", "--max-degree", "1"]);
    assert_eq!(surj.status.code(), Some(2));
}

#[test]
fn exhausted_budgets_are_inconclusive() {
    let out = run(&["verify", "--theorem", "kal5", "--n", "4", "--element-budget", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["outcome"], "inconclusive");
    let timed = Command::new(env!("CARGO_BIN_EXE_framecomplex"))
        .args(["verify", "--theorem", "kal5", "--n", "4"])
        .env("FRAMECOMPLEX_BUDGET_MS", "0")
        .output()
        .unwrap();
    assert_eq!(timed.status.code(), Some(2));
}

#[test]
fn reports_repeat_byte_for_byte() {
    let dir = std::env::temp_dir().join(format!("framecomplex-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let out = run(&["report", "--suite", "homology-oracles", "--seed", "11", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        bytes.push(std::fs::read(&path).unwrap());
    }
    let (x, y) = (bytes.remove(0), bytes.remove(0));
    let _ = std::fs::remove_dir_all(&dir);
    assert_eq!(x, y);
    let v: Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(v["result"][0]["seed"], 11);
    assert!(v.get("runtimes_ms").is_none());
}

#[test]
fn timings_are_opt_in() {
    let out = run(&["verify", "--theorem", "vas3", "--n", "1", "--k", "1", "--timings"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["runtimes_ms"]["verify vas3"].is_u64());
}

#[test]
fn completion_of_a_given_frame() {
    let out = run(&["complete-basis", "--n", "2", "--frame", "1,1,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["basis"]["basis"].as_array().unwrap().len(), 4);
}

#[test]
fn stable_rank_of_z6_is_one() {
    let v = json(&run(&["stable-rank", "--ring", "6"]));
    assert_eq!(v["result"]["stable_rank"], 1);
}
