//! End-to-end CLI checks: CSV outputs parse back losslessly, randomized
//! runs are byte-deterministic, and usage errors exit with code 2.

use std::path::PathBuf;
use std::process::{Command, Output};

use rankmin_core::phase::cells_from_csv;
use rankmin_core::thresholds::curve_from_csv;
use rankmin_core::width::width_from_csv;

fn rankmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankmin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("rankmin-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn thresholds_unique_weak_examples() {
    let text = stdout(&rankmin(&[
        "thresholds",
        "--kind",
        "unique-weak",
        "--beta-grid",
        "0,0.5,1",
    ]));
    let pts = curve_from_csv(&text).unwrap();
    let mus: Vec<f64> = pts.iter().map(|p| p.mu).collect();
    assert_eq!(mus, vec![0.5, 0.875, 1.0]);
}

#[test]
fn thresholds_grid_row_count_and_roundtrip() {
    let text = stdout(&rankmin(&[
        "thresholds",
        "--kind",
        "weak",
        "--beta-grid",
        "0:1:101",
    ]));
    let pts = curve_from_csv(&text).unwrap();
    assert_eq!(pts.len(), 101);
    assert!(pts.iter().all(|p| p.mu >= p.theta - 1e-9));
}

#[test]
fn width_csv_parses() {
    let text = stdout(&rankmin(&[
        "width", "--kind", "weak", "--n", "24", "--beta", "0.25", "--samples", "8", "--seed", "5",
    ]));
    let ests = width_from_csv(&text).unwrap();
    assert_eq!(ests.len(), 1);
    assert_eq!(ests[0].n, 24);
    assert!(ests[0].mean_bound > 0.0);
}

#[test]
fn phase_deterministic_and_boundary_written() {
    let boundary = temp_path("boundary.csv");
    let args = [
        "phase",
        "--program",
        "psd-feasible",
        "--n",
        "6",
        "--trials",
        "2",
        "--beta-grid",
        "0,0.3",
        "--mu-grid",
        "0.4,0.9",
        "--seed",
        "1",
    ];
    let first = stdout(&rankmin(&args));
    let mut with_boundary: Vec<&str> = args.to_vec();
    let bpath = boundary.to_str().unwrap();
    with_boundary.extend_from_slice(&["--boundary", bpath]);
    let second = stdout(&rankmin(&with_boundary));
    assert_eq!(first, second, "identical seeds give identical bytes");
    let (prog, cells) = cells_from_csv(&first).unwrap();
    assert_eq!(prog.unwrap().name(), "psd-feasible");
    assert_eq!(cells.len(), 4);
    assert!(cells.iter().all(|c| c.trials == 2));
    let btext = std::fs::read_to_string(&boundary).unwrap();
    assert!(btext.lines().any(|l| l.starts_with("psd-feasible,")));
    std::fs::remove_file(&boundary).ok();
}

#[test]
fn check_reports_margins() {
    let text = stdout(&rankmin(&[
        "check", "--kind", "weak", "--n", "10", "--beta", "0.2", "--mu", "0.7", "--samples", "20",
        "--seed", "3",
    ]));
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("kind,") && !l.is_empty())
        .collect();
    assert_eq!(rows.len(), 20);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 7);
        fields[5].parse::<f64>().unwrap();
        assert!(fields[6] == "true" || fields[6] == "false");
    }
}

#[test]
fn gnuplot_script_written_alongside() {
    let out = temp_path("curve.csv");
    let res = rankmin(&[
        "thresholds",
        "--kind",
        "unique-strong",
        "--beta-grid",
        "0:1:5",
        "--out",
        out.to_str().unwrap(),
        "--gnuplot",
    ]);
    assert!(res.status.success());
    let gp = out.with_extension("gp");
    let script = std::fs::read_to_string(&gp).unwrap();
    assert!(script.contains("plot"));
    std::fs::remove_file(&out).ok();
    std::fs::remove_file(&gp).ok();
}

#[test]
fn usage_errors_exit_two() {
    let bad_kind = rankmin(&["thresholds", "--kind", "nope"]);
    assert_eq!(bad_kind.status.code(), Some(2));
    let bad_grid = rankmin(&["thresholds", "--kind", "weak", "--beta-grid", "1:0:5"]);
    assert_eq!(bad_grid.status.code(), Some(2));
    let unknown = rankmin(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
    let decreasing = rankmin(&["thresholds", "--kind", "weak", "--beta-grid", "0.5,0.2"]);
    assert_eq!(decreasing.status.code(), Some(2));
}
