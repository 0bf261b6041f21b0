use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use warpheat::experiments::preset;

fn warpheat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpheat")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = warpheat(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn every_command_writes_its_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cases: [(&str, &str, &[&str]); 5] = [
        ("geometry", "power-tail-gamma3", &["geometry_report.txt", "curvature.csv"]),
        ("eigen", "exp-forcing-hyperbolic", &["eigen.csv", "eigen_summary.txt"]),
        ("barrier", "power-tail-gamma3", &["barrier.txt", "barrier.csv", "barrier_check.txt"]),
        ("simulate", "exp-forcing-hyperbolic", &["history.csv", "final.csv", "summary.txt", "history.svg"]),
        ("sweep", "fujita-euclidean", &["sweep.csv", "sweep.svg", "sweep_summary.txt"]),
    ];
    for (cmd, name, files) in cases {
        let out = tmp.path().join(cmd);
        let stdout = run_ok(&[cmd, "--preset", name, "--out", out.to_str().unwrap(), "--strict"]);
        assert!(stdout.lines().any(|l| l.starts_with("PASS")), "{cmd}: {stdout}");
        for f in files {
            assert!(!read(&out, f).is_empty(), "{cmd}: {f} is empty");
        }
    }
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run_ok(&["sweep", "--preset", "fujita-euclidean", "--out", a.to_str().unwrap(), "--threads", "1"]);
    run_ok(&["sweep", "--preset", "fujita-euclidean", "--out", b.to_str().unwrap(), "--threads", "4"]);
    for f in ["sweep.csv", "sweep.svg", "sweep_summary.txt"] {
        assert_eq!(read(&a, f), read(&b, f), "{f} differs");
    }
    let (c, d) = (tmp.path().join("c"), tmp.path().join("d"));
    for dir in [&c, &d] {
        run_ok(&["simulate", "--preset", "power-tail-gamma3", "--out", dir.to_str().unwrap()]);
    }
    for f in ["history.csv", "final.csv", "summary.txt"] {
        assert_eq!(read(&c, f), read(&d, f), "{f} differs");
    }
}

#[test]
fn sweep_reports_the_fujita_dichotomy() {
    let tmp = TempDir::new().unwrap();
    run_ok(&["sweep", "--preset", "fujita-euclidean", "--out", tmp.path().to_str().unwrap()]);
    let csv = String::from_utf8(read(tmp.path(), "sweep.csv")).unwrap();
    let verdicts: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(verdicts[0], "blow-up");
    assert_eq!(verdicts[2], "global-up-to-horizon");
}

#[test]
fn strict_mode_fails_on_a_failed_check() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let out = warpheat(&["geometry", "--preset", "fujita-euclidean", "--out", dir, "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL curvature hypothesis"));
    let out = warpheat(&["geometry", "--preset", "fujita-euclidean", "--out", dir]);
    assert!(out.status.success());
}

#[test]
fn config_files_round_trip_and_hypotheses_are_named() {
    let tmp = TempDir::new().unwrap();
    let cfg = preset("power-tail-gamma3").unwrap();
    let path = tmp.path().join("cfg.toml");
    fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let out = tmp.path().join("out");
    run_ok(&["barrier", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--strict"]);

    let bad = cfg.to_toml().unwrap().replace("gamma = 3.0", "gamma = 1.5");
    fs::write(&path, bad).unwrap();
    let res = warpheat(&["barrier", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("curvature growth") && err.contains("gamma > 2"), "{err}");

    let res = warpheat(&["simulate", "--preset", "no-such-preset"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("fujita-euclidean"));
}
