use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    root.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_menuex")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_reports_both_verdicts() {
    let pyramid = report(&["analyze", &scenario("pyramid.json")]);
    assert_eq!(pyramid["extremality"]["extreme"], true);
    assert_eq!(pyramid["exhaustiveness"]["exhaustive"], true);
    let prism = report(&["analyze", &scenario("prism.json")]);
    assert_eq!(prism["extremality"]["extreme"], false);
    assert_eq!(prism["exhaustiveness"]["exhaustive"], true);
}

#[test]
fn decompose_prints_a_certificate_or_the_trivial_nullspace() {
    let prism = report(&["decompose", &scenario("prism.json"), "--step", "max"]);
    let cert = &prism["extremality"]["certificate"];
    assert_eq!(cert["epsilon"], "1/2");
    assert!(cert["summand_plus"]["vertices"].is_array());
    let pyramid = report(&["decompose", &scenario("pyramid.json")]);
    assert_eq!(pyramid["extremality"]["message"], "extreme: no decomposition exists");
    assert_eq!(pyramid["extremality"]["certificate"]["kind"], "trivial_nullspace");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["analyze".to_string(), scenario("restricted-cone.json")],
        vec!["decompose".to_string(), scenario("prism.json")],
        vec![
            "perturb".to_string(),
            scenario("prism.json"),
            "--delta".into(),
            "1/20".into(),
            "--seed".into(),
            "3".into(),
        ],
        vec![
            "experiment".into(),
            "--preset".into(),
            "simplex".into(),
            "--d".into(),
            "3".into(),
            "--k".into(),
            "5".into(),
            "--samples".into(),
            "20".into(),
        ],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn application_commands() {
    let classify = report(&["classify2d", &scenario("monopoly-three-items.json")]);
    assert_eq!(classify["planar"]["extreme"], false);
    let veto = report(&["veto", &scenario("veto-only.json")]);
    assert_eq!(veto["veto"]["undominated"], false);
    let eval = report(&[
        "evaluate",
        &scenario("veto-only.json"),
        "--sample",
        &scenario("bargaining-types.json"),
        "--compare",
        &scenario("veto-and-favorite.json"),
    ]);
    assert_eq!(eval["evaluation"]["comparison"]["second_dominates"], true);
    let delegation = report(&["delegation", &scenario("strike-triangle.json")]);
    assert_eq!(delegation["delegation"]["extreme"], true);
}

#[test]
fn output_and_plotdata_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let csv = dir.path().join("plot.csv");
    let out = run(&["analyze", &scenario("pentagon.json"), "-o", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(written["command"], "analyze");
    let out = run(&["plotdata", &scenario("pentagon.json"), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.lines().any(|l| l.starts_with("summand_plus_vertex,")));
}

#[test]
fn diagnostics_exit_with_status_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "/nonexistent/scenario.json"]).status.code(), Some(1));
    assert_eq!(run(&["classify2d", &scenario("pyramid.json")]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"space":{"preset":"simplex","d":2},"cone":"unrestricted","menu":[[0.5,0]]}"#).unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
