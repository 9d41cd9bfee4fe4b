//! End-to-end runs of the `chaoslab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn chaoslab(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chaoslab"));
    cmd.args(args).env_remove("SEED").env_remove("JOBS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn list_names_every_experiment() {
    let out = chaoslab(&["list"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.contains("decoupling") && text.contains("lebesgue_rate"));
}

#[test]
fn describe_prints_defaults() {
    let out = chaoslab(&["describe", "lebesgue_rate"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("gamma = 0.5"), "{text}");
    assert!(text.contains("deltas = 0.0625, 0.015625"), "{text}");
    assert_eq!(chaoslab(&["describe", "nope"], &[]).status.code(), Some(2));
}

#[test]
fn flat_field_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "flat.ini",
        "[lebesgue_rate]\ngamma = 0\nreplicas = 200\n",
    );
    let out_dir = dir.path().join("out");
    let out = chaoslab(&["run", &cfg, "--out", out_dir.to_str().unwrap()], &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let m = manifest(&out_dir);
    assert_eq!(m["all_passed"], true);
    assert_eq!(m["experiments"][0]["verdict"]["degenerate"], true);
    assert!(out_dir.join("lebesgue_rate.csv").exists());
}

#[test]
fn shrunken_bound_fails_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "tight.ini",
        "[lebesgue_rate]\nreplicas = 500\nbound_scale = 0.1\n",
    );
    let out_dir = dir.path().join("out");
    let out = chaoslab(&["run", &cfg, "--out", out_dir.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    let m = manifest(&out_dir);
    assert_eq!(m["all_passed"], false);
    assert_eq!(m["experiments"][0]["passed"], false);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL lebesgue_rate"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.ini", "[delta_smp]\ngamma = 2.5\n");
    let out = chaoslab(
        &["run", &cfg, "--out", dir.path().join("o").to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma² < 2 required"));
    let cfg = write(
        dir.path(),
        "typo.ini",
        "[ergodic]\ngamma = 0.5\n  gama = 1\n",
    );
    let out = chaoslab(
        &["run", &cfg, "--out", dir.path().join("o").to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column 3"));
}

#[test]
fn seed_and_jobs_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.ini",
        "seed = 1\n[mean_measure]\nreplicas = 200\ngammas = 0.5\n",
    );
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    let run = |out: &Path, env: &[(&str, &str)]| {
        chaoslab(&["run", &cfg, "--out", out.to_str().unwrap()], env)
    };
    assert!(run(&a, &[("SEED", "77"), ("JOBS", "1")]).status.success());
    assert!(run(&b, &[("SEED", "77"), ("JOBS", "2")]).status.success());
    assert!(run(&c, &[]).status.success());
    assert_eq!(manifest(&a)["seed"], 77);
    assert_eq!(manifest(&c)["seed"], 1);
    let csv = |d: &Path| std::fs::read(d.join("mean_measure.csv")).unwrap();
    assert_eq!(csv(&a), csv(&b));
    assert_ne!(csv(&a), csv(&c));
}
