//! End-to-end tests of the `rodsim` binary: determinism of output bytes,
//! sweep equivalence with single runs, the exit-status contract, and the
//! kernel-table format.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rodsim")
}

fn write_config(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

const SMALL_CLASSICAL: &str = r#"
[rod]
mass = 1.0
length = 1.0

[bath]
temperature = 1.0
gamma_par = 1.0
gamma_perp = 2.0
gamma_rot = 1.0
regime = "classical"

[integrator]
mode = "overdamped"
dt = 0.01
n_steps = 300
record_stride = 10

[experiment]
n_trajectories = 300
seed = 11
emit = ["summary", "timeseries"]
"#;

const SMALL_QUANTUM: &str = r#"
[rod]
mass = 1.0
length = 1.0

[bath]
temperature = 0.0
gamma_par = 1.0
gamma_perp = 1.0
gamma_rot = 1.0
regime = "quantum"
cutoff = 12.0

[integrator]
mode = "inertial"
dt = 0.005
n_steps = 200
record_stride = 20

[experiment]
n_trajectories = 4
seed = 3
"#;

#[test]
fn identical_runs_produce_identical_bytes_across_thread_counts() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", SMALL_CLASSICAL);
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    let s1 = run(&["run", cfg.to_str().unwrap(), "--out", out1.to_str().unwrap(), "--jobs", "1"]);
    let s2 = run(&["run", cfg.to_str().unwrap(), "--out", out2.to_str().unwrap(), "--jobs", "4"]);
    assert_eq!(s1.status.code(), s2.status.code());
    for file in ["summary.txt", "timeseries.csv"] {
        let a = fs::read(out1.join(file)).unwrap();
        let b = fs::read(out2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between runs");
    }
}

#[test]
fn sweep_points_match_single_runs() {
    let dir = tempdir().unwrap();
    let sweep_cfg = format!("{SMALL_CLASSICAL}\n[sweep]\n\"bath.gamma_rot\" = [0.5, 2.0]\n");
    let cfg = write_config(dir.path(), "sweep.toml", &sweep_cfg);
    let sweep_out = dir.path().join("sweep");
    run(&["run", cfg.to_str().unwrap(), "--out", sweep_out.to_str().unwrap()]);

    for (i, gamma_rot) in [(0usize, 0.5f64), (1, 2.0)] {
        let single = SMALL_CLASSICAL
            .replace("gamma_rot = 1.0", &format!("gamma_rot = {gamma_rot}"))
            .replace("seed = 11", &format!("seed = {}", 11 + i));
        let cfg_i = write_config(dir.path(), &format!("single_{i}.toml"), &single);
        let out_i = dir.path().join(format!("single_{i}"));
        run(&["run", cfg_i.to_str().unwrap(), "--out", out_i.to_str().unwrap()]);

        let sweep_summary = fs::read(sweep_out.join(format!("point_{i:03}")).join("summary.txt")).unwrap();
        let single_summary = fs::read(out_i.join("summary.txt")).unwrap();
        assert_eq!(sweep_summary, single_summary, "sweep point {i} differs from its single run");
    }
}

#[test]
fn zero_trajectories_gives_an_empty_summary_and_no_data_files() {
    let dir = tempdir().unwrap();
    let cfg_text = SMALL_CLASSICAL.replace("n_trajectories = 300", "n_trajectories = 0");
    let cfg = write_config(dir.path(), "empty.toml", &cfg_text);
    let out = dir.path().join("out");
    let result = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0));
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("overall pass=true checks=0"), "{summary}");
    assert!(!out.join("timeseries.csv").exists());
}

#[test]
fn invalid_config_exits_with_usage_error() {
    let dir = tempdir().unwrap();
    let cfg_text = SMALL_CLASSICAL.replace("mass = 1.0", "mass = -1.0");
    let cfg = write_config(dir.path(), "bad.toml", &cfg_text);
    let result = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("mass"), "{stderr}");

    let cfg2 = write_config(dir.path(), "unparseable.toml", "this is not toml [");
    let result = run(&["run", cfg2.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn oracle_failure_exits_with_code_one() {
    // A single trajectory cannot pin the MSD slope to 5%.
    let dir = tempdir().unwrap();
    let cfg_text = SMALL_CLASSICAL
        .replace("n_trajectories = 300", "n_trajectories = 1")
        .replace("n_steps = 300", "n_steps = 2000");
    let cfg = write_config(dir.path(), "tiny.toml", &cfg_text);
    let out = dir.path().join("out");
    let result = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("overall pass=false"), "{summary}");
}

#[test]
fn output_dir_falls_back_to_the_environment() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "env.toml", SMALL_CLASSICAL);
    let out = dir.path().join("from_env");
    let status = Command::new(bin())
        .args(["run", cfg.to_str().unwrap()])
        .env("RODSIM_OUT_DIR", &out)
        .output()
        .unwrap();
    assert!(status.status.code().is_some());
    assert!(out.join("summary.txt").exists());
}

#[test]
fn kernel_table_is_even_and_anchored_at_zero_lag() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "quantum.toml", SMALL_QUANTUM);
    let out = dir.path().join("out");
    let result = run(&[
        "kernel-table",
        cfg.to_str().unwrap(),
        "--tau-max",
        "2.0",
        "--points",
        "33",
        "--symmetric",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    let table = fs::read_to_string(out.join("kernel.csv")).unwrap();
    let rows: Vec<(f64, f64)> = table
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("tau"))
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 65);
    // even under tau -> -tau
    for k in 0..rows.len() / 2 {
        let (t_neg, c_neg) = rows[k];
        let (t_pos, c_pos) = rows[rows.len() - 1 - k];
        assert!((t_neg + t_pos).abs() < 1e-12);
        assert_eq!(c_neg, c_pos);
    }
    // zero-lag row: T = 0 kernel value hbar gamma omega_c^2 / (2 pi)
    let (t0, c0) = rows[rows.len() / 2];
    assert_eq!(t0, 0.0);
    let expected = 144.0 / (2.0 * std::f64::consts::PI);
    assert!(
        (c0 / expected - 1.0).abs() < 1e-6,
        "zero-lag kernel {c0} vs {expected}"
    );
}

#[test]
fn mode_and_trajectory_overrides_reach_validation() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", SMALL_CLASSICAL);
    // switching to the quantum regime without a cutoff must fail validation
    let result = run(&["run", cfg.to_str().unwrap(), "--mode", "quantum"]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("cutoff"));
    // trajectory override down to zero: empty summary, exit 0
    let out = dir.path().join("out");
    let result = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--trajectories",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    assert!(fs::read_to_string(out.join("summary.txt"))
        .unwrap()
        .contains("checks=0"));
}

#[test]
fn quantum_run_without_cutoff_is_rejected() {
    let dir = tempdir().unwrap();
    let cfg_text = SMALL_QUANTUM.replace("cutoff = 12.0\n", "");
    let cfg = write_config(dir.path(), "nocutoff.toml", &cfg_text);
    let result = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("cutoff"), "{stderr}");
}
