use serde_json::Value;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_macdonald")).args(args).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

#[test]
fn constant_e_poly() {
    let (code, out, _) = run(&["e-poly", "--type", "A1", "--lambda", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1");
}

#[test]
fn p_poly_is_monic_at_the_top_of_the_orbit() {
    let (code, out, _) = run(&["p-poly", "--type", "A2", "--J", "2", "--lambda", "1,0", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["leading"]["coeff"], "1");
}

#[test]
fn norm_suite_passes_on_c1() {
    let (code, out, _) = run(&["verify", "--suite", "norms", "--type", "C1v-C1", "--trunc", "8"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("norms C1v-C1: pass"), "{out}");
}

#[test]
fn verify_json_lists_suites() {
    let (code, out, _) = run(&["verify", "--suite", "examples", "--type", "A2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["suites"][0]["suite"], "examples");
}

#[test]
fn gamma_is_keyed_by_reduced_words() {
    let (code, out, _) = run(&["gamma", "--type", "A2", "--J", "2", "--f", "e[1,0]", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let keys: Vec<&String> = v["coords"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["e", "s1", "s2s1"]);
}

#[test]
fn identity_similarity_changes_nothing() {
    let (_, plain, _) = run(&["matrix-weight", "--type", "C1", "--format", "json"]);
    let (code, out, _) = run(&["matrix-weight", "--type", "C1", "--similarity", "1,0;0,1", "--format", "json"]);
    assert_eq!(code, 0);
    let a: Value = serde_json::from_str(&plain).unwrap();
    let b: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(a["matrix"], b["similarity"]);
}

#[test]
fn specialised_labels() {
    let (code, out, _) = run(&["e-poly", "--type", "A1", "--lambda", "-1", "--labels", "1/2"]);
    assert_eq!(code, 0);
    assert!(out.contains("e[-1]") && !out.contains("k1"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["e-poly", "--type", "G2", "--lambda", "0"]).0, 2);
    assert_eq!(run(&["e-poly"]).0, 2);
    assert_eq!(run(&["inner", "--f", "e[", "--g", "1"]).0, 2);
    assert_eq!(run(&["p-poly", "--type", "A2", "--J", "1", "--epsilon", "+,-", "--lambda", "1,0"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}
