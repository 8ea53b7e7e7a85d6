//! Runs the binary and checks output, exit codes and JSON shape.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkage-morse")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

const SEVEN: &str = "1,1,1,1,1,1,1";

#[test]
fn triangle_cells() {
    let o = run(&["--lengths", "1,1,1", "cells"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "dim 0: 2; chi = 2\n");
    assert_eq!(stdout(&run(&["--lengths", "1,1,1,3/2", "cells"])), "dim 0: 6; dim 1: 6; chi = 0\n");
}

#[test]
fn invalid_input_exits_with_two() {
    let o = run(&["--lengths", "1,1,1,1", "cells"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("degenerate"), "{}", stderr(&o));
    for args in [
        &["cells"][..],
        &["--lengths", "1,x,1", "cells"],
        &["--lengths", "1,1,5", "cells"],
        &["--lengths", "1,1,1,1,1,1,1,1,1,1,1", "cells"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn size_guard_can_be_lifted() {
    let o = run(&["--lengths", "1,1,1,1,1", "--max-n", "4", "betti"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("refusing"), "{}", stderr(&o));
    assert_eq!(run(&["--lengths", "1,1,1,1,1", "--max-n", "5", "betti"]).status.code(), Some(0));
    assert_eq!(run(&["--lengths", "1,1,1,1,1", "--max-n", "4", "--force", "betti"]).status.code(), Some(0));
}

#[test]
fn path_cap_fault_exits_with_one() {
    let o = run(&["--lengths", SEVEN, "--path-cap", "0", "reverse"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("implementation fault"));
    let o = run(&["--lengths", SEVEN, "--path-cap", "0", "verify"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("check failed: "));
    assert!(stdout(&o).contains("[FAIL] connecting paths"));
}

#[test]
fn verify_passes_on_the_equilateral_heptagon() {
    let o = run(&["--lengths", SEVEN, "verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("critical final:    1,6,30,6,1"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn critical_cells_by_stage() {
    let v = json(&["--lengths", SEVEN, "critical"]);
    assert_eq!(v["stage"], "final");
    assert_eq!(v["total"], 44);
    assert_eq!(v["per_dim"], serde_json::json!([1, 6, 30, 6, 1]));
    let initial = json(&["--lengths", SEVEN, "critical", "--stage", "initial"]);
    assert!(initial["total"].as_u64().unwrap() > 44);
    let sphere = json(&["--lengths", "1,1,1,1,1,9/2", "critical"]);
    assert_eq!(sphere["total"], 2);
    let labels: Vec<&str> = sphere["cells"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|g| g.as_array().unwrap())
        .map(|c| c["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["{5}{4}{3}{2}{1}{6}", "{1}{2,3,4,5}{6}"]);
}

#[test]
fn bijection_rows() {
    let o = run(&["--lengths", SEVEN, "bijection"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.ends_with("22 rows; surjective: true\n"));
    for label in ["{6}{5}{4}{3}{2}{1}{7}", "{3}{4,5,6}{7,1,2}", "{4}{3}{2}{1}{7,5,6}", "{6}{5}{1}{2,3,4}{7}"] {
        assert!(text.contains(label), "{label}");
    }
}

#[test]
fn json_shapes() {
    let cells = json(&["--lengths", "1,1,1,3/2", "cells"]);
    assert_eq!(cells["n"], 4);
    assert_eq!(cells["euler"], 0);
    assert_eq!(cells["linkage"]["sorted"], serde_json::json!(["1", "1", "1", "3/2"]));
    let betti = json(&["--lengths", "1,1,1,3/2", "betti"]);
    assert_eq!(betti["betti_cellular"], serde_json::json!([1, 1]));
    assert_eq!(betti["betti_shortsets"], betti["betti_cellular"]);
    let report = json(&["--lengths", SEVEN, "verify"]);
    for key in ["cells_per_dim", "critical_initial_per_dim", "critical_final_per_dim", "betti_cellular", "checks"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    assert_eq!(report["perfect"], true);
    let reverse = json(&["--lengths", SEVEN, "reverse"]);
    assert_eq!(reverse["reversals"].as_array().unwrap().len(), 48);
    let field = json(&["--lengths", "1,1,1,1,7/2", "field"]);
    let pairs = field["field"]["pairs"].as_array().unwrap();
    assert!(pairs.iter().all(|p| ["forward", "backward"].contains(&p[3].as_str().unwrap())));
    let export = json(&["--lengths", "1,1,1,3/2", "export"]);
    assert_eq!(export["hasse"]["nodes"].as_array().unwrap().len(), 12);
}

#[test]
fn dot_guard() {
    let o = run(&["--lengths", "1,1,1,1,1,3/2", "export", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--lengths", "1,1,1,1,1,3/2", "export", "--format", "dot", "--force"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("digraph hasse {"));
    let o = run(&["--lengths", "1,1,1,3/2", "field", "--format", "dot"]);
    assert!(stdout(&o).contains("peripheries=2"));
}

#[test]
fn fuzz_runs() {
    let o = run(&["fuzz", "--seed", "1", "--max-n", "6", "--cases", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("seed 1: 10 passed, 0 failed"));
    let o = run(&["fuzz", "--max-n", "3", "--cases", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("n = 3").count(), 3);
    let v = json(&["fuzz", "--seed", "7", "--max-n", "5", "--cases", "4"]);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["passed"], 4);
}

#[test]
fn out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("betti.txt");
    let o = run(&["--lengths", "1,1,1,3/2", "betti", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "cellular:   1,1\nshort sets: 1,1\n");
}
