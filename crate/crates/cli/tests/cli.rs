use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn singer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singer"))
        .args(args)
        .env_remove("SINGER_SEED")
        .output()
        .expect("spawn singer")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = singer(&all);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stdout)));
    (v, out.status.code().unwrap())
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const SYM2: &str = "d=3 q=7 factors=[sym(2)@0]";

#[test]
fn injectivity_text_and_exit_codes() {
    let out = singer(&["check-injectivity", "--q", "7", "--d", "3", "--C", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Checked 64 vectors."));

    let (v, code) = json(&["check-injectivity", "--q", "3", "--d", "2", "--C", "2"]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["verdict"], "collision");
    assert_eq!(v["result"]["first"], serde_json::json!([0, 0]));
    assert_eq!(v["result"]["second"], serde_json::json!([2, 2]));

    let (v, code) = json(&["check-injectivity", "--q", "65536", "--d", "10", "--C", "4", "--sum-K"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["count"], 715);
}

#[test]
fn model_spectrum_example() {
    let (v, code) = json(&["model-spectrum", "--q", "7", "--d", "3", "--K", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 10);
    assert_eq!(v["distinct"], true);
    assert_eq!(v["example"]["E"], "147");
    assert_eq!(v["example"]["digits"], serde_json::json!([0, 0, 3]));
}

#[test]
fn singer_demo_verdicts() {
    let (v, code) = json(&["singer-demo", "--q", "7", "--d", "3", "--spec", "sym(3)"]);
    assert_eq!(code, 0);
    assert_eq!(v["distinct_eigenvalues"], 10);
    assert_eq!(v["eigenspaces_one_dimensional"], true);
    assert_eq!(v["model_match"]["verdict"], "match");

    // not multiplicity-free, so a repeated eigenvalue is the expected outcome
    let (v, code) = json(&["singer-demo", "--q", "5", "--d", "3", "--spec", "nat@0,nat@1"]);
    assert_eq!(code, 0);
    assert_eq!(v["multiplicity_free"], false);
}

#[test]
fn round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.json");
    let res = path(dir.path(), "res.json");
    let out = singer(&["gen-instance", "--spec", SYM2, "--plant-singer", "--out", &inst]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let (v, code) = json(&["rewrite", "--in", &inst, "--out", &res]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "verified");

    let (v, code) = json(&["verify", "--in", &inst, "--result", &res]);
    assert_eq!(code, 0);
    assert_eq!(v["certificate"]["verdict"], "verified");
    assert_eq!(v["oracle"]["verdict"], "consistent");

    let mut r: Value = serde_json::from_str(&std::fs::read_to_string(&res).unwrap()).unwrap();
    let entry = &mut r["phi"][0][0][0];
    *entry = Value::from((entry.as_u64().unwrap() + 1) % 343);
    std::fs::write(&res, serde_json::to_string(&r).unwrap()).unwrap();
    let (v, code) = json(&["verify", "--in", &inst, "--result", &res]);
    assert_eq!(code, 2);
    assert_eq!(v["certificate"]["verdict"], "rejected");
}

#[test]
fn public_instance_has_no_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.json");
    assert_eq!(singer(&["gen-instance", "--spec", SYM2, "--public", "--out", &inst]).status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert!(v.get("oracle").is_none_or(Value::is_null));
}

#[test]
fn output_is_deterministic_and_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.json");
    let b = path(dir.path(), "b.json");
    let c = path(dir.path(), "c.json");
    singer(&["--seed", "7", "gen-instance", "--spec", SYM2, "--out", &a]);
    singer(&["--seed", "7", "gen-instance", "--spec", SYM2, "--out", &b]);
    let out = Command::new(env!("CARGO_BIN_EXE_singer"))
        .args(["gen-instance", "--spec", SYM2, "--out", &c])
        .env("SINGER_SEED", "7")
        .output()
        .unwrap();
    assert!(out.status.success());
    let read = |p: &str| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&a), read(&c));

    let first = singer(&["--format", "json", "rewrite", "--in", &a]);
    let second = singer(&["--format", "json", "rewrite", "--in", &a]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn hopeless_instance_exhausts_budget() {
    // identity generators never contain a Singer cycle
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "id.json");
    let id: Vec<Vec<u64>> = (0..6).map(|i| (0..6).map(|j| u64::from(i == j)).collect()).collect();
    let file = serde_json::json!({ "p": 7, "f": 1, "d": 3, "spec": SYM2, "generators": [id] });
    std::fs::write(&inst, file.to_string()).unwrap();
    let (_, code) = json(&["rewrite", "--in", &inst]);
    assert_eq!(code, 3);
}

#[test]
fn malformed_inputs_exit_1_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");

    std::fs::write(&bad, "{\"p\": 7").unwrap();
    let (v, code) = json(&["rewrite", "--in", &bad]);
    assert_eq!(code, 1);
    assert!(v["error"].as_str().unwrap().contains("bad.json"));

    let file = serde_json::json!({ "p": 7, "f": 1, "d": 3, "spec": SYM2, "generators": [[[1, 2], [3, 4]]] });
    std::fs::write(&bad, file.to_string()).unwrap();
    let (v, code) = json(&["rewrite", "--in", &bad]);
    assert_eq!(code, 1);
    assert!(v["error"].as_str().unwrap().contains("generator 0"), "{v}");

    let mut id: Vec<Vec<u64>> = (0..6).map(|i| (0..6).map(|j| u64::from(i == j)).collect()).collect();
    id[2][3] = 7;
    let file = serde_json::json!({ "p": 7, "f": 1, "d": 3, "spec": SYM2, "generators": [id] });
    std::fs::write(&bad, file.to_string()).unwrap();
    let (v, code) = json(&["rewrite", "--in", &bad]);
    assert_eq!(code, 1);
    assert!(v["error"].as_str().unwrap().contains("generators[0]"), "{v}");

    let (_, code) = json(&["rewrite", "--in", &path(dir.path(), "missing.json")]);
    assert_eq!(code, 1);

    assert_eq!(singer(&["check-injectivity", "--q", "7"]).status.code(), Some(1));
    assert_eq!(singer(&["--help"]).status.code(), Some(0));
}

#[test]
fn non_multiplicity_free_spec_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "x.json");
    let (v, code) = json(&["gen-instance", "--spec", "d=3 q=5 factors=[nat@0,nat@1]", "--out", &inst]);
    assert_eq!(code, 1);
    assert!(v["error"].as_str().unwrap().contains("multiplicity-free"), "{v}");
}
