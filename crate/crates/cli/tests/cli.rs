//! End-to-end tests of the binary: exit codes, output shapes, input
//! error reporting, determinism, and the dual -> ktheory pipeline.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn mtk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf8 stderr")
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("mtk-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("temp file writes");
    path
}

#[test]
fn ktheory_rose3_text() {
    let out = mtk(&["ktheory", data("rose3.json").to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("K0 = Z/2"), "{text}");
    assert!(text.contains("K1 = 0"), "{text}");
}

#[test]
fn ktheory_bs23_json_shape() {
    let out = mtk(&[
        "ktheory",
        data("bs23.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["schema"], 1);
    assert_eq!(value["command"], "ktheory");
    assert_eq!(value["report"]["k1"]["torsion"][0], "2");
    assert_eq!(value["report"]["k0"]["rank"], 0);
}

#[test]
fn dynamics_verdicts() {
    let out = mtk(&["dynamics", data("bs23.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("cofinal (minimal boundary action): true"));
    assert!(text.contains("locally contractive: yes"));
    assert!(text.contains("topologically free: yes"));

    let out = mtk(&["dynamics", data("bs12.json").to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("topologically free: no"));
}

#[test]
fn dynamics_certificates() {
    let out = mtk(&[
        "dynamics",
        data("bs23.json").to_str().unwrap(),
        "--certificate",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let witness = &value["report"]["certificates"]["topological_freeness"]["components"][0]
        ["witnesses"]["v"];
    assert_eq!(witness["prime"], 2);
    assert_eq!(witness["cycle"][0], "e");
}

#[test]
fn validate_rejects_sourced_presentation() {
    let bad = write_temp(
        "sourced.json",
        r#"{"vertices":["v"],"edges":[],"classes":{"v":"trivial"},"omega":{}}"#,
    );
    let out = mtk(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).contains("in-degree 0"), "{}", stdout_of(&out));
}

#[test]
fn parse_errors_carry_location() {
    let bad = write_temp("syntax.json", "{\n  \"vertices\": [,]\n}\n");
    let out = mtk(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains(":2:"), "expected line number in {err:?}");
}

#[test]
fn dual_pipeline_reaches_free_group_answer() {
    let out = mtk(&["dual", data("gog_rose2.json").to_str().unwrap()]);
    assert!(out.status.success());
    let dual = write_temp("f2-dual.json", &stdout_of(&out));
    let out = mtk(&["ktheory", dual.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("K0 = Z^2"), "{text}");
    assert!(text.contains("K1 = Z^2"), "{text}");
}

#[test]
fn seeded_outputs_are_byte_identical() {
    let args = [
        "oracle",
        "--suite",
        "linalg",
        "--cases",
        "5",
        "--seed",
        "9",
        "--format",
        "json",
    ];
    let first = mtk(&args);
    let second = mtk(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let input = data("bs23.json");
    let report = ["ktheory", input.to_str().unwrap(), "--format", "json"];
    assert_eq!(mtk(&report).stdout, mtk(&report).stdout);
}

#[test]
fn ambiguous_decomposition_is_certification_failure() {
    let family = write_temp(
        "ambiguous.json",
        r#"{"universe":["a","b"],"members":{"m1":["a"],"m2":["b"],"m3":["a","b"]},"action":[]}"#,
    );
    let out = mtk(&["setfamily", family.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("uniqueness"), "{}", stderr_of(&out));
}

#[test]
fn lifttree_command() {
    let out = mtk(&[
        "lifttree",
        data("bs23.json").to_str().unwrap(),
        "--depth",
        "2",
        "--verify",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("7 nodes"), "{text}");
    assert!(text.contains("verification: ok"), "{text}");

    let guard = mtk(&[
        "lifttree",
        data("bs23.json").to_str().unwrap(),
        "--depth",
        "8",
        "--max-nodes",
        "5",
    ]);
    assert_eq!(guard.status.code(), Some(1));
    assert!(stderr_of(&guard).contains("size guard"), "{}", stderr_of(&guard));
}

#[test]
fn validate_detects_graph_kind() {
    let out = mtk(&[
        "validate",
        data("multitree_layers.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["report"]["kind"], "graph");
    assert_eq!(value["report"]["detail"]["multitree"], true);
}

#[test]
fn shipped_inputs_give_expected_invariants() {
    for (file, n) in [
        ("rose2.json", 2),
        ("rose4.json", 4),
        ("rose5.json", 5),
        ("rose6.json", 6),
    ] {
        let out = mtk(&["ktheory", data(file).to_str().unwrap()]);
        assert!(out.status.success());
        let text = stdout_of(&out);
        let expected = if n == 2 {
            "K0 = 0".to_string()
        } else {
            format!("K0 = Z/{}", n - 1)
        };
        assert!(text.contains(&expected), "{file}: {text}");
    }

    // the Z-vertex loop data routed through the dual translation
    let out = mtk(&["dual", data("gog_bs23.json").to_str().unwrap()]);
    assert!(out.status.success());
    let dual = write_temp("bs23-dual.json", &stdout_of(&out));
    let out = mtk(&["dynamics", dual.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("topologically free: yes"));

    let out = mtk(&["setfamily", data("family_crossing.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("independent: true"));
    assert!(text.contains("finitely aligned: true"));
}

#[test]
fn unknown_suite_is_an_input_error() {
    let out = mtk(&["oracle", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_small_run_reports_every_suite() {
    let out = mtk(&["oracle", "--cases", "2", "--seed", "5", "--format", "json"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let suites = value["report"]["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 7);
    assert!(suites.iter().all(|s| s["cases"] == 2));
}
