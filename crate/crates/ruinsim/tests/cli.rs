//! End-to-end checks of the command-line interface through the built binary.

use std::process::Command;

fn ruinsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ruinsim"))
}

const TINY_CONFIG: &str = r#"
[model]
mu = 3.0
a = 2.0
b = 1.0
epsilon = 0.1
rho = 0.99

[sim]
n = 50
reps = 500
seed = 11
u_grid = [1.0, 10.0]

[run]
estimators = ["new:crude", "pk:cv_max"]

[output]
path = "PLACEHOLDER"
format = "csv"
"#;

fn write_config(dir: &std::path::Path, out: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("exp.toml");
    let text = TINY_CONFIG.replace("PLACEHOLDER", &out.display().to_string());
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn constants_prints_reference_row() {
    let out = ruinsim().args(["constants", "--n", "1,100"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("ratio_new"), "{stdout}");
    assert!(stdout.contains("0.093150"), "{stdout}");
    assert!(stdout.contains("0.732138"), "{stdout}");
    assert!(stdout.contains("0.119758"), "{stdout}");
}

#[test]
fn estimate_at_zero_recovers_rho() {
    let out = ruinsim()
        .args([
            "estimate",
            "--u",
            "0",
            "--estimator",
            "new:crude",
            "--reps",
            "200",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let psi_line = stdout
        .lines()
        .find(|l| l.starts_with("psi_hat"))
        .expect("psi_hat line");
    let value: f64 = psi_line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((value - 0.99).abs() < 1e-10, "{psi_line}");
}

#[test]
fn experiment_writes_csv_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let config = write_config(dir.path(), &out_a);

    let run = |workers: &str| {
        let status = ruinsim()
            .args(["experiment", "--config"])
            .arg(&config)
            .args(["--workers", workers])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(&out_a).unwrap()
    };
    let first = run("1");
    let second = run("4");
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("u,series,method,n,reps,seed,estimate,psi_hat,std_err,"));
    assert_eq!(text.lines().count(), 1 + 2 * 2, "header plus 4 rows");
}

#[test]
fn workers_env_var_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("env.csv");
    let config = write_config(dir.path(), &out_csv);
    let status = ruinsim()
        .args(["experiment", "--config"])
        .arg(&config)
        .args(["--workers", "1"])
        .env("RUINSIM_WORKERS", "3")
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out_csv.exists());
}

#[test]
fn invalid_inputs_exit_nonzero_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        TINY_CONFIG
            .replace("rho = 0.99", "rho = 1.5")
            .replace("PLACEHOLDER", "x.csv"),
    )
    .unwrap();
    let out = ruinsim()
        .args(["experiment", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("rho"), "{stderr}");

    let out = ruinsim()
        .args(["experiment", "--preset", "fig99"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = ruinsim()
        .args(["estimate", "--u", "-1", "--estimator", "new:crude"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
