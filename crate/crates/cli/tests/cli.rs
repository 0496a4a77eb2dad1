use std::fs;
use std::path::Path;

use levyband::formats::{OptimizeReport, SimResultDoc};

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Out {
    let mut o = Vec::new();
    let mut e = Vec::new();
    let mut argv = vec!["levyband"];
    argv.extend_from_slice(args);
    let code = levyband::run(argv, &mut o, &mut e);
    Out {
        code,
        stdout: String::from_utf8(o).unwrap(),
        stderr: String::from_utf8(e).unwrap(),
    }
}

fn write_model(dir: &Path, name: &str, p: f64) -> String {
    let path = dir.join(name);
    let text = format!(r#"{{"p": {p}, "lambda": 1, "claims": {{"kind": "exp", "rate": 1}}, "sigma2": 0, "q": 0.1}}"#);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn table1_prints_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("azcue_muler.json");
    fs::write(&model, levyband::AZCUE_MULER).unwrap();
    let out = run(&["table1", "--model", model.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows: Vec<&str> = out.stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[2].contains("10.964") && rows[3].contains("11.370"), "{}", out.stdout);
    assert!(out.stderr.contains("subcommand  table1"));
}

#[test]
fn scale_grid_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(dir.path(), "m.json", 1.5);
    let out = run(&["scale", "--model", &m, "--grid", "0:10:0.01"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "x,W,W',W'',Z,Z1");
    assert_eq!(lines.len(), 1 + 1001);
    assert_eq!(lines[1].split(',').next(), Some("0"));
    assert!(lines[1001].starts_with("10,"));
    // W(0) = 1/p with 12 significant digits.
    assert_eq!(lines[1].split(',').nth(1), Some("0.666666666667"));
}

#[test]
fn optimize_returns_zero_barrier() {
    let dir = tempfile::tempdir().unwrap();
    // (q+λ)² = 1.21 ≥ pλμ = 1.1.
    let m = write_model(dir.path(), "m.json", 1.1);
    let out = run(&["optimize", "--model", &m, "--penalty", "zero", "--K", "0"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rep: OptimizeReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(rep.bands.len(), 1);
    assert_eq!((rep.bands[0].b_minus, rep.bands[0].b_plus), (0.0, 0.0));
    assert!(rep.converged);
}

#[test]
fn optimize_writes_files_and_lists_them() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(dir.path(), "m.json", 1.5);
    let report = dir.path().join("r.json");
    let curves = dir.path().join("c.csv");
    let out = run(&[
        "optimize", "--model", &m, "--out", report.to_str().unwrap(),
        "--curves", curves.to_str().unwrap(), "--grid", "0:5:0.5",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains(report.to_str().unwrap()) && out.stdout.contains(curves.to_str().unwrap()));
    assert!(out.stdout.contains("sha256:"));
    let rep: OptimizeReport = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!((rep.bands[0].b_plus - 2.2122).abs() < 1e-4);
    let csv = fs::read_to_string(&curves).unwrap();
    assert_eq!(csv.lines().next(), Some("x,G#,D"));
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn round_trip_matches_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(dir.path(), "m.json", 1.5);
    let report = dir.path().join("r.json");
    let pen = ["--penalty", "affine", "--c", "0.5", "--c0", "-0.2"];
    let mut args = vec!["optimize", "--model", &m, "--out", report.to_str().unwrap()];
    args.extend_from_slice(&pen);
    assert_eq!(run(&args).code, 0);
    let strategy = report.to_str().unwrap();
    let mut args = vec!["value", "--model", &m, "--strategy", strategy, "--grid", "0:4:2"];
    args.extend_from_slice(&pen);
    let out = run(&args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let values: Vec<(f64, f64)> = out
        .stdout
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
            (c[0], c[1])
        })
        .collect();
    assert_eq!(values.len(), 3);
    for (i, (x, v)) in values.into_iter().enumerate() {
        let (xs, seed) = (x.to_string(), (31 + i).to_string());
        let mut args = vec![
            "simulate", "--model", &m, "--strategy", strategy, "--x0", &xs, "--paths", "100000", "--seed", &seed,
        ];
        args.extend_from_slice(&pen);
        let out = run(&args);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let r: SimResultDoc = serde_json::from_str(&out.stdout).unwrap();
        assert!((r.mean - v).abs() <= 3.0 * r.stderr, "{x}: {} ± {} vs {v}", r.mean, r.stderr);
        assert!(out.stderr.contains("(stdout)"));
    }
}

#[test]
fn ruin_transform_needs_no_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(dir.path(), "m.json", 1.5);
    let out = run(&["simulate", "--model", &m, "--ruin-transform", "--x0", "2", "--paths", "5000", "--threads", "2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r: SimResultDoc = serde_json::from_str(&out.stdout).unwrap();
    assert!(r.mean > 0.0 && r.mean < 1.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(dir.path(), "m.json", 1.5);
    assert_eq!(run(&["scale", "--model", &m]).code, 2);
    assert_eq!(run(&["scale", "--model", &m, "--grid", "0:1"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["scale", "--model", "/nonexistent.json", "--grid", "0:1:1"]).code, 2);
    assert_eq!(run(&["simulate", "--model", &m, "--x0", "1"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);

    // Negative loading is a computation error.
    let bad = write_model(dir.path(), "bad.json", 0.5);
    let out = run(&["scale", "--model", &bad, "--grid", "0:1:1"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("InvalidModel"), "{}", out.stderr);

    let out = run(&["gerber-shiu", "--model", &m, "--penalty", "exp", "--c", "-1", "--v", "-2", "--grid", "0:1:1"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("InvalidPenalty"), "{}", out.stderr);

    let am = dir.path().join("am.json");
    fs::write(&am, levyband::AZCUE_MULER).unwrap();
    let out = run(&["optimize", "--model", am.to_str().unwrap(), "--max-bands", "1"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("IterationCapExceeded"));
}
