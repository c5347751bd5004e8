//! Black-box tests of the `comwb` binary: determinism, thread invariance,
//! exit codes, and output formats.

use std::fs;
use std::path::Path;
use std::process::Command;

fn comwb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_comwb"))
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let status = comwb()
            .args([
                "lis-hist", "--n", "200", "--q", "0.9", "--trials", "20", "--seed", "7", "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(read(&a, "lis-hist.csv"), read(&b, "lis-hist.csv"));
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4", "8"] {
        let out = tmp.path().join(format!("t{threads}"));
        let status = comwb()
            .args([
                "mallows-sample", "--n", "100", "--q", "0.8", "--trials", "24", "--seed", "3",
                "--threads", threads, "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(read(&out, "mallows-sample.csv"));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn csv_embeds_provenance_and_has_one_record_per_trial() {
    let tmp = tempfile::tempdir().unwrap();
    let status = comwb()
        .args(["lis-hist", "--n", "50", "--trials", "10", "--out"])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = String::from_utf8(read(tmp.path(), "lis-hist.csv")).unwrap();
    assert!(csv.contains("# run_id="));
    assert!(csv.contains("# version="));
    assert!(csv.contains("# config="));
    let data_lines: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .collect();
    assert_eq!(data_lines[0], "trial,lis");
    assert_eq!(data_lines.len(), 11); // header + 10 trials
    // JSON summary carries the config echo.
    let json: serde_json::Value =
        serde_json::from_slice(&read(tmp.path(), "lis-hist.json")).unwrap();
    assert_eq!(json["config"]["n"], 50);
    assert!(json["summary"]["mean"].as_f64().unwrap() > 0.0);
    assert!(json["wall_time_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn svg_output_is_self_contained() {
    let tmp = tempfile::tempdir().unwrap();
    let status = comwb()
        .args(["lis-hist", "--n", "50", "--trials", "30", "--svg", "--out"])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    let svg = String::from_utf8(read(tmp.path(), "lis-hist.svg")).unwrap();
    assert!(svg.contains("<svg"));
    assert!(!svg.contains("href"));
    assert!(svg.contains("run_id="));
}

#[test]
fn usage_errors_exit_2() {
    // Unknown subcommand (clap).
    let status = comwb().arg("no-such-command").status().unwrap();
    assert_eq!(status.code(), Some(2));
    // Unknown flag (clap).
    let status = comwb().args(["lis-hist", "--bogus", "1"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    // Malformed numeric list (ours).
    let tmp = tempfile::tempdir().unwrap();
    let status = comwb()
        .args(["ginibre-moments", "--n", "10", "--p", "2,x", "--out"])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    // Odd n is outside the ASEP experiment's domain.
    let status = comwb()
        .args(["asep-run", "--n", "41", "--trials", "4", "--out"])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // Ginibre density needs n >= 2 for the overlap part.
    let status = comwb()
        .args(["ginibre-density", "--n", "1", "--out"])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn deterministic_subcommands_produce_expected_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let status = comwb()
        .args(["qstirling", "--beta", "1.0", "--n-list", "100,1000", "--out"])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = String::from_utf8(read(tmp.path(), "qstirling.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("100,"));

    let status = comwb()
        .args([
            "foursquare", "--n", "40", "--beta", "1.0", "--trials", "16", "--seed", "5", "--out",
        ])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = String::from_utf8(read(tmp.path(), "foursquare.csv")).unwrap();
    // Each row's counts sum to n.
    for line in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let c: Vec<u64> = line.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        assert_eq!(c.iter().sum::<u64>(), 40);
    }
}
