use std::process::{Command, Output};

use proptest::prelude::*;
use sinc_volterra::bench::parse_csv;
use sinc_volterra::Method;

const BIN: &str = env!("CARGO_BIN_EXE_sinc-volterra");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

#[test]
fn sweep_writes_parseable_csv_to_stdout() {
    let out = run(&[
        "sweep",
        "--method",
        "de-colloc",
        "--problem",
        "pm45",
        "--n-list",
        "3,6,9",
        "--probe-points",
        "32",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .starts_with("method,problem,N,h,max_error,assemble_ms,solve_ms,eval_ms,probe_points\n"));
    let rows = parse_csv(text.as_bytes()).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.truncation).collect::<Vec<_>>(),
        vec![3, 6, 9]
    );
    assert!(rows
        .iter()
        .all(|r| r.method == Method::DeCollocation && r.probe_points == 32));
}

#[test]
fn sweep_to_file_then_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rz.csv");
    let path = path.to_str().unwrap();
    let out = run(&[
        "sweep",
        "--method",
        "se-colloc",
        "--problem",
        "rz4",
        "--n-list",
        "4,9,16,25",
        "--out",
        path,
        "--timed",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let out = run(&["slopes", "--in", path]);
    assert_eq!(out.status.code(), Some(0));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("-3.1408"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(
        run(&["sweep", "--method", "se-colloc", "--problem", "rz4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--method",
            "se-colloc",
            "--problem",
            "rz4",
            "--n-list",
            "x"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--method",
            "se-colloc",
            "--problem",
            "rz4",
            "--n-list",
            "3,3"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--method",
            "de-colloc",
            "--problem",
            "rz4",
            "--n-list",
            "3",
            "--d",
            "2"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify-theorem4", "--problem", "rz4", "--n", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn slopes_rejects_short_or_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.csv");
    std::fs::write(&short, "method,problem,N,h,max_error,assemble_ms,solve_ms,eval_ms,probe_points\nse-colloc,rz4,4,1,0.1,0,0,0,8\n").unwrap();
    assert_eq!(
        run(&["slopes", "--in", short.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "method,problem\nwhat,rz4\n").unwrap();
    assert_eq!(
        run(&["slopes", "--in", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let unwritable = dir.path().join("missing-dir").join("out.csv");
    let out = run(&[
        "sweep",
        "--method",
        "se-colloc",
        "--problem",
        "rz4",
        "--n-list",
        "2",
        "--out",
        unwritable.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_theorem4_reports_discrepancy() {
    let out = run(&["verify-theorem4", "--problem", "rz4", "--n", "16"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("max node discrepancy"));
}

#[test]
fn help_documents_inclusive_probe_grid() {
    let out = run(&["sweep", "--help"]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("both endpoints included"));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn unknown_names_are_usage_errors(word in "[a-z-]{1,12}") {
        prop_assume!(!Method::ALL.iter().any(|m| m.as_str() == word));
        prop_assume!(word != "rz4" && word != "pm45");
        let code = run(&["sweep", "--method", &word, "--problem", "rz4", "--n-list", "2"]).status.code();
        prop_assert_eq!(code, Some(2));
        let code = run(&["sweep", "--method", "rz-colloc", "--problem", &word, "--n-list", "2"]).status.code();
        prop_assert_eq!(code, Some(2));
    }

    #[test]
    fn valid_sweeps_succeed(method in prop::sample::select(Method::ALL.to_vec()), start in 2usize..6, count in 1usize..4) {
        let ns: Vec<String> = (0..count).map(|k| (start + 2 * k).to_string()).collect();
        let list = ns.join(",");
        let out = run(&["sweep", "--method", method.as_str(), "--problem", "pm45", "--n-list", &list, "--probe-points", "16"]);
        prop_assert_eq!(out.status.code(), Some(0));
        let rows = parse_csv(out.stdout.as_slice()).unwrap();
        prop_assert_eq!(rows.len(), count);
    }
}
