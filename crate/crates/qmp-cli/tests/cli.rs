use std::collections::BTreeSet;
use std::process::{Command, Output};

use serde_json::Value;

fn qmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmp")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn kron_example() {
    let v = json_of(&qmp(&["kron", "--alpha", "[2,1]", "--beta", "[2,1]", "--gamma", "[2,1]"]));
    assert_eq!(v["value"], "1");
    assert_eq!(v["manifest"]["subcommand"], "kron");
    assert_eq!(v["manifest"]["schema_version"], "1");
}

#[test]
fn lr_and_stretch() {
    let v = json_of(&qmp(&["lr", "--alpha", "[1]", "--beta", "[1]", "--lambda", "[1,1]"]));
    assert_eq!(v["value"], "1");
    let v = json_of(&qmp(&["stretch", "--alpha", "[1,1]", "--beta", "[1,1]", "--gamma", "[1,1]", "--kmax", "3"]));
    let values: Vec<&str> = v["values"].as_array().unwrap().iter().map(|x| x["value"].as_str().unwrap()).collect();
    // g(k·(1,1), k·(1,1), k·(1,1)) is 1 for even k and 0 for odd k.
    assert_eq!(values, ["0", "1", "0"]);
}

#[test]
fn count_tables_csv() {
    let out = qmp(&["count", "tables", "--k", "2", "--a", "1,1", "--b", "1,1", "--c", "1,1", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "value\n4\n");
}

#[test]
fn three_qubit_polytope() {
    let v = json_of(&qmp(&["polytope", "--dims", "2,2,2"]));
    assert_eq!(v["coordinates"], "max-eigenvalue");
    let ressayre: BTreeSet<Vec<String>> = v["facets"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["source"] == "ressayre")
        .map(|f| {
            assert_eq!(f["c"], "-1");
            strings(&f["H"])
        })
        .collect();
    let expect: BTreeSet<Vec<String>> = [["-1", "-1", "1"], ["-1", "1", "-1"], ["1", "-1", "-1"]]
        .iter()
        .map(|h| h.iter().map(|s| s.to_string()).collect())
        .collect();
    assert_eq!(ressayre, expect);
    let verts: BTreeSet<Vec<String>> = v["vertices"].as_array().unwrap().iter().map(strings).collect();
    let expect: BTreeSet<Vec<String>> = [["1", "1", "1"], ["1", "1/2", "1/2"], ["1/2", "1", "1/2"], ["1/2", "1/2", "1"], ["1/2", "1/2", "1/2"]]
        .iter()
        .map(|h| h.iter().map(|s| s.to_string()).collect())
        .collect();
    assert_eq!(verts, expect);
}

#[test]
fn exact_output_is_byte_identical() {
    let args = ["polytope", "--dims", "2,2,2", "--seed", "5"];
    assert_eq!(qmp(&args).stdout, qmp(&args).stdout);
}

#[test]
fn stab_sweep_example() {
    let dir = tempfile::tempdir().unwrap();
    let emit = dir.path().join("vectors.csv");
    let v = json_of(&qmp(&["stab", "sweep", "--n", "3", "--d", "2", "--ineq", "ssa,mono", "--emit", emit.to_str().unwrap()]));
    let fams = v["families"].as_array().unwrap();
    assert_eq!(fams[0]["family"], "ssa");
    assert_eq!(fams[0]["min_slack"], "0");
    assert_eq!(fams[0]["violations"], 0);
    assert!(fams[1]["violations"].as_u64().unwrap() > 0);
    let text = std::fs::read_to_string(&emit).unwrap();
    assert_eq!(text.lines().next().unwrap(), "index,S_1,S_2,S_12,S_3,S_13,S_23,S_123");
    assert_eq!(text.lines().count() as u64, v["distinct_vectors"].as_u64().unwrap() + 1);
    assert!(dir.path().join("vectors.csv.manifest.json").exists());
}

#[test]
fn stab_entropy_from_generators() {
    let dir = tempfile::tempdir().unwrap();
    let gens = dir.path().join("bell.csv");
    std::fs::write(&gens, "1,0,1,0\n0,1,0,1\n").unwrap();
    let v = json_of(&qmp(&["stab", "entropy", "--n", "2", "--d", "2", "--gens", gens.to_str().unwrap()]));
    assert_eq!(v["entropies"]["S_1"], "1");
    assert_eq!(v["entropies"]["S_12"], "0");
    assert_eq!(v["classical_entropies"]["S_1"], "2");
    assert_eq!(v["lagrangian"], true);
    std::fs::write(&gens, "1,0,0,0\n0,1,0,0\n").unwrap();
    assert_eq!(qmp(&["stab", "entropy", "--n", "2", "--d", "2", "--gens", gens.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn dh_emit_and_sample() {
    let dir = tempfile::tempdir().unwrap();
    let emit = dir.path().join("chambers.json");
    let sample = dir.path().join("grid.csv");
    let v = json_of(&qmp(&["dh", "--sym", "3", "--emit", emit.to_str().unwrap(), "--sample", sample.to_str().unwrap(), "--grid", "6"]));
    assert_eq!(v["total_mass"], "1");
    let chambers: Value = serde_json::from_str(&std::fs::read_to_string(&emit).unwrap()).unwrap();
    assert_eq!(chambers["total_mass"], "1");
    assert!(chambers["manifest"].is_object());
    assert!(!chambers["chambers"].as_array().unwrap().is_empty());
    let text = std::fs::read_to_string(&sample).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "y1,value_num,value_den");
    assert_eq!(lines.count(), 7);
}

fn regression_state(dir: &std::path::Path) -> std::path::PathBuf {
    let p = dir.join("state.json");
    std::fs::write(&p, "[[1,0],[1,0],[0,0],[0,0],[1,0],[0,0],[2,0],[0,0]]").unwrap();
    p
}

#[test]
fn flow_trace_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let state = regression_state(dir.path());
    let trace = dir.path().join("trace.csv");
    let v = json_of(&qmp(&["flow", "--state", state.to_str().unwrap(), "--emit", trace.to_str().unwrap()]));
    assert_eq!(v["converged"], true);
    assert_eq!(v["monotone"], true);
    for x in v["lambda"].as_array().unwrap() {
        assert!((x.as_f64().unwrap() - 0.5).abs() < 1e-4);
    }
    let header = std::fs::read_to_string(&trace).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "step,lambda_1,lambda_2,lambda_3,norm2,entropy");
    let out = qmp(&["flow", "--state", state.to_str().unwrap(), "--max-steps", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn flow_refine_matches_polytope_schema() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("w.json");
    std::fs::write(&state, "[[0,0],[1,0],[1,0],[0,0],[1,0],[0,0],[0,0],[0,0]]").unwrap();
    let v = json_of(&qmp(&["flow", "refine", "--state", state.to_str().unwrap(), "--max-rounds", "40"]));
    assert_eq!(v["complete"], true);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
    for key in ["facets", "vertices", "coordinates", "dims"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn usage_and_validation_exit_codes() {
    assert_eq!(qmp(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(qmp(&["kron", "--alpha", "[1]"]).status.code(), Some(64));
    assert_eq!(qmp(&["kron", "--alpha", "[1,2]", "--beta", "[3]", "--gamma", "[3]"]).status.code(), Some(2));
    assert_eq!(qmp(&["stab", "sweep", "--n", "2", "--d", "4"]).status.code(), Some(2));
    assert_eq!(qmp(&["--help"]).status.code(), Some(0));
}
