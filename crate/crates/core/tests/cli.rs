use std::path::Path;
use std::process::{Command, Output};

use hotelling::cli::{serialize_trace, Format};
use hotelling::elimination::{
    iterate_three_symmetric, iterate_two_firm, ChoiceSet, EliminationTrace,
};
use hotelling::ModelParams;
use serde_json::Value;

fn hotelling(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hotelling"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = hotelling(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).expect("golden file exists")
}

fn pairs(v: &Value) -> Vec<(f64, f64)> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect()
}

#[test]
fn trivial_trace_matches_golden() {
    let trace = EliminationTrace {
        rounds: vec![
            vec![ChoiceSet::full(); 2],
            vec![ChoiceSet::point(0.5).unwrap(); 2],
        ],
        limit: vec![ChoiceSet::point(0.5).unwrap(); 2],
        converged_at: Some(1),
        hausdorff_gaps: vec![0.5],
        inefficiencies: vec![1.0, 1.0],
    };
    assert_eq!(serialize_trace(&trace, Format::Csv), golden("trivial.csv"));
    assert_eq!(
        serialize_trace(&trace, Format::Json),
        golden("trivial.json")
    );
}

#[test]
fn two_firm_reference_trace_matches_golden() {
    let trace = iterate_two_firm(&ModelParams::two(1.0, 3.0).unwrap(), 1e-9, 10_000).unwrap();
    let text = serialize_trace(&trace, Format::Csv);
    assert_eq!(text, golden("two_firms_1_3.csv"));
    for row in [
        "1,1,0,0.2,0.8",
        "1,2,0,0.3,0.4",
        "1,2,1,0.6,0.7",
        "2,2,0,0.3,0.36",
        "3,2,0,0.32,0.34",
    ] {
        assert!(text.lines().any(|l| l == row), "missing {row}");
    }
}

#[test]
fn three_firm_reference_trace_matches_golden() {
    let trace = iterate_three_symmetric(1.0, 1e-9, 10_000).unwrap();
    let text = serialize_trace(&trace, Format::Csv);
    assert_eq!(text, golden("three_firms_a1.csv"));
    let lo1 = hotelling::elimination::trace::fmt_sig(1.0 / 6.0);
    let hi1 = hotelling::elimination::trace::fmt_sig(5.0 / 6.0);
    let lo2 = hotelling::elimination::trace::fmt_sig(17.0 / 72.0);
    let hi2 = hotelling::elimination::trace::fmt_sig(55.0 / 72.0);
    assert!(text.contains(&format!("1,1,0,{lo1},{hi1}")));
    assert!(text.contains(&format!("2,3,0,{lo2},{hi2}")));
}

#[test]
fn rationalize_lists_first_round_pieces() {
    let report = json(&["rationalize", "--n", "2", "--a", "1,3"]);
    let round1 = &report["trace"]["rounds"][1];
    assert_eq!(pairs(&round1[0]), vec![(0.2, 0.8)]);
    assert_eq!(pairs(&round1[1]), vec![(0.3, 0.4), (0.6, 0.7)]);
    assert_eq!(report["config"]["settings"]["max_rounds"], 10_000);
    let limit = pairs(&report["trace"]["limit"][0]);
    assert!((limit[0].0 - 1.0 / 3.0).abs() < 1e-6 && (limit[1].0 - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn rationalize_three_firms_limit() {
    let report = json(&["rationalize", "--n", "3", "--a", "1"]);
    for firm in report["trace"]["limit"].as_array().unwrap() {
        let (lo, hi) = pairs(firm)[0];
        assert!((lo - 2.0 / 7.0).abs() < 1e-6, "{lo}");
        assert!((hi - 5.0 / 7.0).abs() < 1e-6, "{hi}");
    }
    let csv = String::from_utf8(
        hotelling(&["rationalize", "--n", "3", "--a", "1", "--format", "csv"]).stdout,
    )
    .unwrap();
    assert!(csv.contains("limit,1,0,0.285714"));
}

#[test]
fn shares_equal_location() {
    let report = json(&["shares", "--n", "2", "--a", "1,3", "--c", "0.2,0.2"]);
    let shares: Vec<f64> = report["result"]["shares"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((shares[0] - 0.75).abs() < 1e-12 && (shares[1] - 0.25).abs() < 1e-12);
}

#[test]
fn fractions_are_accepted() {
    let a = json(&["shares", "--a", "1/3,2/3", "--c", "1/4,3/4"]);
    let b = json(&[
        "shares",
        "--a",
        "0.3333333333333333,0.6666666666666666",
        "--c",
        "0.25,0.75",
    ]);
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["rationalize", "--a", "1,3", "--format", "csv"][..],
        &[
            "reaction-table",
            "--n",
            "3",
            "--a",
            "1",
            "--c-l",
            "0.2",
            "--steps",
            "21",
        ][..],
        &[
            "best-response",
            "--a",
            "1,3",
            "--opponents",
            "0.4",
            "--oracle",
            "--grid-m",
            "2000",
        ][..],
        &["nash", "--a", "1,3", "--scan-n", "501"][..],
    ] {
        assert_eq!(hotelling(args).stdout, hotelling(args).stdout, "{args:?}");
    }
    let par = hotelling(&["rationalize", "--a", "1,2", "--format", "csv"]).stdout;
    let seq = hotelling(&[
        "rationalize",
        "--a",
        "1,2",
        "--format",
        "csv",
        "--sequential",
    ])
    .stdout;
    let strip = |b: &[u8]| {
        String::from_utf8(b.to_vec())
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# exec"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&par), strip(&seq));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    let out = hotelling(&[
        "rationalize",
        "--a",
        "1,3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, hotelling(&["rationalize", "--a", "1,3"]).stdout);
    let report: Value = serde_json::from_slice(&written).unwrap();
    let trace = EliminationTrace::from_json(&report["trace"].to_string()).unwrap();
    assert_eq!(
        trace,
        iterate_two_firm(&ModelParams::two(1.0, 3.0).unwrap(), 1e-9, 10_000).unwrap()
    );
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| hotelling(args).status.code();
    assert_eq!(code(&["shares", "--a", "1,3", "--c", "0.2,0.7"]), Some(0));
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["shares", "--a", "1,3"]), Some(1));
    assert_eq!(code(&["shares", "--a", "x", "--c", "0.5"]), Some(1));
    assert_eq!(code(&["shares", "--a", "1,3", "--c", "0.2"]), Some(2));
    assert_eq!(code(&["shares", "--a", "1,-3", "--c", "0.2,0.3"]), Some(2));
    assert_eq!(code(&["shares", "--a", "1,3", "--c", "0.2,1.5"]), Some(2));
    assert_eq!(
        code(&["rationalize", "--a", "1,3", "--max-rounds", "2"]),
        Some(3)
    );
    assert_eq!(code(&["verify", "--a", "1,3", "--grid-m", "200"]), Some(0));
    assert_eq!(
        code(&["verify", "--a", "1,3", "--grid-m", "200", "--eps-opt=-1"]),
        Some(2)
    );
    // A coarse stopping rule leaves the analytic limit visibly off the closed form.
    assert_eq!(
        code(&["verify", "--a", "1,3", "--grid-m", "100", "--tol", "0.05"]),
        Some(4)
    );
}

#[test]
fn non_convergence_still_reports_partial_trace() {
    let out = hotelling(&["rationalize", "--a", "1,3", "--max-rounds", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["trace"]["rounds"].as_array().unwrap().len(), 3);
    assert!(report["trace"]["converged_at"].is_null());
}

#[test]
fn verify_reports_every_check() {
    let report = json(&["verify", "--a", "1,3", "--grid-m", "200"]);
    let text = report.to_string();
    for check in [
        "limit_vs_closed_form",
        "analytic_monotone",
        "grid_limit_gap",
        "unrestricted_counterexamples",
    ] {
        assert!(text.contains(check), "{check}");
    }
}
