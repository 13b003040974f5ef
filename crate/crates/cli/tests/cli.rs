use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use disprop_core::division::{read_division, read_instance, write_instance};
use disprop_core::rational::q;
use disprop_core::{Instance, Measure};
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disprop"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn two_agent_example(dir: &Path) {
    let heavy = Measure::new(vec![q(0, 1), q(1, 2), q(1, 1)], vec![q(2, 1), q(0, 1)]).unwrap();
    let inst = Instance::new_strict(vec![Measure::uniform(), heavy], vec![q(1, 2), q(1, 2)]).unwrap();
    fs::write(dir.join("inst.json"), write_instance(&inst)).unwrap();
}

#[test]
fn solve_two_agent_example_with_trace_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    two_agent_example(d);
    let out = run(d, &["solve", "--in", "inst.json", "--out", "div.json", "--trace", "trace.json", "--check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let div = read_division(&fs::read_to_string(d.join("div.json")).unwrap()).unwrap();
    assert_eq!(div.cut_count(), 1);
    assert_eq!(div.cuts, vec![q(1, 4)]);
    assert_eq!(json(d.join("trace.json"))["root"]["step"]["case"], "BASE_PAIR");
}

#[test]
fn verify_reports_negative_surplus_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    two_agent_example(d);
    // agent 1 values [1/2,1] at nothing
    fs::write(d.join("bad.json"), r#"{"cuts":["1/2"],"owners":[0,1]}"#).unwrap();
    let out = run(d, &["verify", "--in", "inst.json", "--div", "bad.json"]);
    assert_eq!(out.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid"], false);
    assert_eq!(report["surplus"][1], "-1/2");
}

#[test]
fn lower_bound_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["generate", "--family", "lowerbound", "--n", "3", "--out", "inst.json"]).status.code(), Some(0));
    assert_eq!(run(d, &["solve", "--in", "inst.json", "--out", "div.json", "--check"]).status.code(), Some(0));
    let out = run(d, &["oracle", "--in", "inst.json", "--max-cuts", "3", "--out", "oracle.json"]);
    assert_eq!(out.status.code(), Some(0));
    let oracle = json(d.join("oracle.json"));
    assert_eq!(oracle["best_cuts"], "infeasible-on-grid");
    assert_eq!(oracle["evidence_only"], true);
    // the solver's four cuts are reachable once they are on the grid
    let out = run(d, &["oracle", "--in", "inst.json", "--max-cuts", "4", "--with-cuts", "div.json", "--out", "o4.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(d.join("o4.json"))["best_cuts"], 4);
}

#[test]
fn malformed_input_names_file_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("broken.json"),
        r#"{"measures":[{"breakpoints":["0","1"],"densities":["1"]},{"breakpoints":["0","1"],"densities":["-1"]}],"demands":["1/2","1/2"]}"#,
    )
    .unwrap();
    let out = run(d, &["solve", "--in", "broken.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.json") && err.contains("measures[1].densities[0]"), "{err}");

    let out = run(d, &["solve", "--in", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn demands_must_sum_to_one_at_the_top_level() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("short.json"),
        r#"{"measures":[{"breakpoints":["0","1"],"densities":["1"]}],"demands":["1/2"]}"#,
    )
    .unwrap();
    assert_eq!(run(d, &["solve", "--in", "short.json"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(d, &["solve", "--in", "x.json", "--bogus"]).status.code(), Some(64));
    assert_eq!(run(d, &["generate", "--family", "random", "--n", "3", "--out", "r.json"]).status.code(), Some(64));
    assert_eq!(run(d, &["--help"]).status.code(), Some(0));
}

#[test]
fn sliding_knife_refuses_unequal_demands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    two_agent_example(d);
    let inst = read_instance(&fs::read_to_string(d.join("inst.json")).unwrap(), true).unwrap();
    let unequal = Instance::new_strict(inst.measures, vec![q(1, 3), q(2, 3)]).unwrap();
    fs::write(d.join("unequal.json"), write_instance(&unequal)).unwrap();
    assert_eq!(run(d, &["baseline", "--in", "unequal.json", "--method", "sliding"]).status.code(), Some(2));
    let out = run(d, &["baseline", "--in", "unequal.json", "--method", "denominator", "--out", "cd.json"]);
    assert_eq!(out.status.code(), Some(0));
    read_division(&fs::read_to_string(d.join("cd.json")).unwrap()).unwrap();
}

#[test]
fn pair_explain_lists_the_pigeonhole_cover() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let left = Measure::new(vec![q(0, 1), q(1, 3), q(1, 1)], vec![q(3, 2), q(3, 4)]).unwrap();
    let inst = Instance::new_strict(vec![Measure::uniform(), left], vec![q(2, 5), q(3, 5)]).unwrap();
    fs::write(d.join("inst.json"), write_instance(&inst)).unwrap();
    let out = run(d, &["pair", "--in", "inst.json", "--explain", "--out", "pair.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(d.join("pair.json"));
    assert_eq!(v["lemma"]["q"], "5");
    assert_eq!(v["candidates"].as_array().unwrap().len(), 5);
    let total: disprop_core::Rational = v["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["ge_mass"].as_str().unwrap().parse::<disprop_core::Rational>().unwrap())
        .sum();
    assert_eq!(total, q(2, 1));
}

#[test]
fn written_files_are_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        run(d, &["generate", "--family", "random", "--n", "4", "--seed", "3", "--out", "r.json"]).status.code(),
        Some(0)
    );
    let text = fs::read_to_string(d.join("r.json")).unwrap();
    let inst = read_instance(&text, true).unwrap();
    assert_eq!(write_instance(&inst), text);
    assert_eq!(run(d, &["solve", "--in", "r.json", "--out", "div.json"]).status.code(), Some(0));
    assert_eq!(run(d, &["verify", "--in", "r.json", "--div", "div.json"]).status.code(), Some(0));
}

#[test]
fn campaign_report_is_frozen() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(d, &["conjecture", "campaign", "--n", "3", "--count", "1", "--seed", "2026", "--out", "c.jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let expected =
        fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/campaign_n3_count1_seed2026.jsonl"))
            .unwrap();
    assert_eq!(fs::read_to_string(d.join("c.jsonl")).unwrap(), expected);
}

#[test]
fn two_agent_campaign_finds_every_witness() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(d, &["conjecture", "campaign", "--n", "2", "--count", "50", "--seed", "11", "--out", "c.jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(d.join("c.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 50);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["outcome"], "witness");
        assert_eq!(v["witness"]["residuals"], serde_json::json!(["0", "0"]));
    }
}
