use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use swlme::output::read_snapshot;

fn swlme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swlme")).args(args).output().unwrap()
}

fn run_small(dir: &Path, extra: &[&str]) -> Output {
    let out = format!("--output-dir={}", dir.display());
    let mut args = vec!["run", "--test=6", "--n_cells=40", "--t_end=0.01", out.as_str()];
    args.extend_from_slice(extra);
    swlme(&args)
}

#[test]
fn run_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_small(dir.path(), &["--snapshot_times=0.005"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.trim_end().ends_with("PASS"), "{stdout}");
    let final_csv = fs::read_to_string(dir.path().join("final.csv")).unwrap();
    let snap = read_snapshot(&final_csv).unwrap();
    assert_eq!(snap.x.len(), 40);
    assert!(dir.path().join("snapshot_t0.005.csv").exists());
    let profiles = fs::read_to_string(dir.path().join("profiles.csv")).unwrap();
    assert_eq!(profiles.lines().count(), 102);
}

#[test]
fn runs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert!(run_small(dir.path(), &["--order=2", "--mode=implicit", "--cfl=2"]).status.success());
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("final.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn overrides_beat_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("case.cfg");
    fs::write(&cfg, "# dam break\ntest = 6\nn_cells = 100\nt_end = 0.01\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = swlme(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--n_cells=30",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let snap = read_snapshot(&fs::read_to_string(out_dir.join("final.csv")).unwrap()).unwrap();
    assert_eq!(snap.x.len(), 30);
}

#[test]
fn wellbalance_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = format!("--output-dir={}", dir.path().display());
    let out = swlme(&["wellbalance", "--test=1", "--n_cells=50", "--t_end=0.05", &out_dir]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("IMPo2"), "{stdout}");
    assert!(dir.path().join("wellbalance_test1.csv").exists());
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = format!("--output-dir={}", dir.path().display());
    for args in [
        vec!["wellbalance", "--test=6", out_dir.as_str()],
        vec!["run", "--test=9", out_dir.as_str()],
        vec!["run", "--n_cells=1", out_dir.as_str()],
        vec!["run", "--bogus=1"],
    ] {
        let out = swlme(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "test = 1\nspeed = 3\n").unwrap();
    let out = swlme(&["run", "--config", cfg.to_str().unwrap(), &out_dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let out = swlme(&["run", "--config", "/nonexistent/case.cfg"]);
    assert_eq!(out.status.code(), Some(1));
}
