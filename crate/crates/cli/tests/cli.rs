use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppchow"))
        .current_dir(fixtures())
        .args(args)
        .output()
        .expect("spawn ppchow")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn validate_accepts_fixture_complexes() {
    let out = run(&["validate", "F1.json", "F2.json", "F5.json", "half.json", "F3.json", "F3sub.json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["files"].as_array().unwrap().len(), 6);
}

#[test]
fn validate_reports_overlapping_cells() {
    let out = run(&["validate", "overlapping.json"]);
    assert_eq!(code(&out), 2);
    let d = &json(&out)["files"][0]["diagnostic"];
    assert_eq!(d["error"], "NotAComplex");
    assert_eq!(d["witness"]["cells"], serde_json::json!([0, 1]));
}

#[test]
fn validate_reports_face_mismatch() {
    let out = run(&["validate", "bad_pp.json"]);
    assert_eq!(code(&out), 2);
    let d = &json(&out)["files"][0]["diagnostic"];
    assert_eq!(d["error"], "FaceMismatch");
    assert_eq!(d["witness"]["cones"], serde_json::json!([0, 1]));
    assert_eq!(d["witness"]["face"], serde_json::json!([1]));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["basis", "no_such_file.json"]);
    assert_eq!(code(&out), 2);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "Parse");
}

#[test]
fn basis_dimensions() {
    for (complex, which, dim) in [
        ("F3.json", "pp-cone", 4),
        ("F2.json", "affine", 3),
        ("F1.json", "homology", 2),
    ] {
        let out = run(&["basis", complex, "--which", which]);
        assert_eq!(code(&out), 0, "{complex} {which}");
        let v = json(&out);
        assert_eq!(v["dim"], dim, "{complex} {which}");
        assert_eq!(v["basis"].as_array().unwrap().len(), dim as usize);
    }
}

#[test]
fn ddc_matches_golden() {
    let out = run(&["ddc", "vertex0_tuple.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("ddc_vertex0.json"));
}

#[test]
fn push_matches_golden() {
    let out = run(&["push", "vertex0_tuple.json", "--to", "F1.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("push_vertex0.json"));
}

#[test]
fn delta_matches_golden() {
    let out = run(&["delta", "point_class.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("delta_point.json"));
}

#[test]
fn refine_reproduces_fixture() {
    let out = run(&["refine", "F3.json", "--point", "1,1"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, golden("refine_F3.json"));
    let fixture: Value =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("F3sub.json")).unwrap())
            .unwrap();
    assert_eq!(serde_json::from_str::<Value>(&stdout).unwrap(), fixture);
}

#[test]
fn degree_of_point_class() {
    let out = run(&["degree", "point_class.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["degree"], "1");
}

#[test]
fn green_of_ray_divisor() {
    let out = run(&["green", "ray_p2.json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["green"], true);
    assert_eq!(v["regularity"]["regular"], false);
    assert!(v["certificate"]["form"].is_object());
}

#[test]
fn output_is_deterministic() {
    let a = run(&["green", "ray_p2.json", "--seed", "7"]);
    let b = run(&["green", "ray_p2.json", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn property_suite_passes() {
    let out = run(&["check", "--suite", "properties", "--depth", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["suite"], "properties");
    assert_eq!(v["passed"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
}
