use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logchart")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn saturate_reports_hilbert_basis() {
    let (code, v) = report(&["saturate", &data("m23.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["verb"], "saturate");
    assert_eq!(v["verdict"], "ok");
    assert_eq!(v["result"]["saturation"]["generators"], serde_json::json!([["1"]]));
    assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn saturate_reads_presentations() {
    let (code, v) = report(&["saturate", &data("presentation.json")]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn classify_reports_flags() {
    let (code, v) = report(&["classify", &data("m23.json")]);
    assert_eq!(code, 0);
    let text = v["result"].to_string();
    assert!(text.contains("\"fs\":false"), "{text}");
}

#[test]
fn missing_field_is_an_input_error() {
    let dir = std::env::temp_dir().join(format!("logchart-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"ambient":{"free_rank":1,"torsion":[]}}"#).unwrap();
    let (code, v) = report(&["saturate", path.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(code, 2);
    assert_eq!(v["verdict"], "error");
    assert!(v["error"].as_str().unwrap().contains("generators: missing field"), "{v}");
}

#[test]
fn map_outside_codomain_is_refused() {
    let (code, v) = report(&["check-chart", "--hom", &data("outside.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["verdict"], "error");
}

#[test]
fn check_chart_passes_and_fails() {
    let (code, v) = report(&["check-chart", "--hom", &data("diag23.json"), "--residue-char", "5"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["kummer_etale"], true);

    let (code, v) = report(&["check-chart", "--hom", &data("diag23.json"), "--residue-char", "3"]);
    assert_eq!(code, 1, "{v}");
    assert!(v["counterexample"].is_object());

    let (code, v) = report(&["check-chart", "--hom", &data("diagonal.json")]);
    assert_eq!(code, 1, "{v}");
    assert_eq!(v["verdict"], "fail");
    assert!(v["counterexample"].is_object());
}

#[test]
fn covers_classify_and_check() {
    let (code, v) = report(&["covers", "classify", "--monoid", &data("n1.json"), "--annihilator", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"].as_array().unwrap().len(), 4);

    let (code, v) = report(&["covers", "check", "--monoid", &data("n2.json"), "--annihilator", "2"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["pairs"].as_array().unwrap().len(), 25);
}

#[test]
fn cohomology_verbs() {
    let (code, v) = report(&["cohomology", "group", "--invariants", "2,2", "--char", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["dims"], serde_json::json!([1, 2, 3, 4, 5]));

    let (code, v) = report(&["cohomology", "cech", "--hom", &data("diag23.json"), "--degree-bound", "4"]);
    assert_eq!(code, 0, "{v}");

    let (code, v) = report(&["cohomology", "polydisc", "--n", "2", "--level", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["dims"], serde_json::json!([1, 2, 1]));
}

#[test]
fn pushout_modes() {
    for mode in ["raw", "fine", "fs"] {
        let (code, v) =
            report(&["pushout", "--left", &data("power2.json"), "--right", &data("identity1.json"), "--mode", mode]);
        assert_eq!(code, 0, "{mode}: {v}");
    }
}

#[test]
fn verify_suite_smoke_and_fault() {
    let (code, v) = report(&["verify-suite", "--scale", "smoke"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["verdict"], "ok");

    let (code, v) = report(&["verify-suite", "--criterion", "1", "--inject-fault", "saturation"]);
    assert_eq!(code, 1);
    assert!(!v["counterexample"].is_null(), "{v}");
}

#[test]
fn output_is_deterministic() {
    let a = run(&["verify-suite", "--scale", "smoke"]);
    let b = run(&["verify-suite", "--scale", "smoke"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["covers", "check", "--monoid", &data("n2.json"), "--annihilator", "3"]);
    let b = run(&["covers", "check", "--monoid", &data("n2.json"), "--annihilator", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["cohomology", "group"]).status.code(), Some(2));
}
