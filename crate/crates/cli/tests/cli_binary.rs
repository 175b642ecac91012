use std::path::Path;
use std::process::{Command, Output};

fn qbattery(args: &[&str], out_root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbattery"))
        .args(args)
        .env("QBATTERY_OUT", out_root)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn presets_are_listed_and_shown() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbattery(&["presets", "--list"], dir.path());
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);

    let out = qbattery(&["presets", "--show", "fig6"], dir.path());
    assert!(String::from_utf8(out.stdout).unwrap().contains("R = 0.1"));
    assert_eq!(qbattery(&["presets", "--show", "nope"], dir.path()).status.code(), Some(1));
}

#[test]
fn sweep_defaults_to_the_environment_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.toml", "R = 1\nd = [0, 2]\nOmega = 1\nt_max = 1\ndt_out = 0.1\n");
    let out = qbattery(&["sweep", "--config", &cfg, "--workers", "2"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("tiny").join("index.csv").exists());

    let explicit = dir.path().join("explicit");
    let out = qbattery(&["sweep", "--config", &cfg, "--out", explicit.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    assert!(explicit.join("tiny_R1_delta0_d2_Omega1.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "R = 5\nd = 10\nOmega = 0\n");
    let out = qbattery(&["simulate", "--config", &bad], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let grid = write(dir.path(), "grid.toml", "R = 5\nd = 1\nOmega = [1, 2]\nt_max = 1\n");
    assert_eq!(qbattery(&["simulate", "--config", &grid], dir.path()).status.code(), Some(1));

    let missing = dir.path().join("missing.toml");
    assert_eq!(qbattery(&["sweep", "--config", missing.to_str().unwrap()], dir.path()).status.code(), Some(1));

    let one = write(dir.path(), "one.toml", "R = 5\nt_max = 1\n");
    assert_eq!(qbattery(&["simulate", "--config", &one], dir.path()).status.code(), Some(0));
}

#[test]
fn fast_validation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbattery(&["validate", "--fast"], dir.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 6);
}

#[test]
fn validation_catches_a_flipped_memory_sign() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbattery(&["validate", "--fast", "--inject-fault", "flip-sign"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let analytic = stdout.lines().find(|l| l.contains("analytic-limit")).unwrap();
    assert!(analytic.starts_with("[FAIL]") && analytic.contains("|E| ="), "{analytic}");
}

#[test]
fn validation_rejects_a_coarse_quadrature_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "coarse.toml", "R = 5\nquadrature_dt = 0.1\n");
    let out = qbattery(&["validate", "--fast", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
}
