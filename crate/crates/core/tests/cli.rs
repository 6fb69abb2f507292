use std::process::{Command, Output};

use thetamult::av::{PeriodMatrix, PeriodMatrixFile, PolarizationType};

fn run(args: &[&str], envs: &[(&str, &std::path::Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_thetamult"));
    cmd.args(args).env_remove("THETAMULT_OUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_tau(dir: &std::path::Path, d: &[u32], tau: &PeriodMatrix) -> std::path::PathBuf {
    let file = PeriodMatrixFile::from_period_matrix(tau, &PolarizationType::new(d.to_vec()).unwrap());
    let path = dir.join("tau.json");
    std::fs::write(&path, file.to_text()).unwrap();
    path
}

#[test]
fn check_exit_codes() {
    let out = run(&["check", "--type", "1,2", "--seed", "4"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["block_verdict"], "full-rank");

    // Product of elliptic curves with (2,2): the Segre relation lies in the kernel.
    let dir = tempfile::tempdir().unwrap();
    let path = write_tau(dir.path(), &[2, 2], &PeriodMatrix::identity_imag(2));
    let out = run(&["check", "--tau", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["check", "--type", "2,3"], &[]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--type", "1,2", "--bogus"], &[]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"], &[]).status.code(), Some(1));
    assert_eq!(run(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn out_dir_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--type", "2", "--samples", "3"];
    let out = run(&args, &[("THETAMULT_OUT_DIR", env_dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir.path().join("summary.json").exists());

    let mut with_flag = args.to_vec();
    let flag = flag_dir.path().join("r");
    with_flag.extend(["--out", flag.to_str().unwrap()]);
    let env2 = tempfile::tempdir().unwrap();
    run(&with_flag, &[("THETAMULT_OUT_DIR", env2.path())]);
    assert!(flag.join("records.jsonl").exists());
    assert!(!env2.path().join("records.jsonl").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(flag.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["aggregate"]["n_samples"], 3);
}

#[test]
fn file_mode_sweep_uses_one_sample() {
    let dir = tempfile::tempdir().unwrap();
    let tau = thetamult::experiments::random_siegel(2, 3, 1.0);
    let path = write_tau(dir.path(), &[1, 2], &tau);
    let out_dir = dir.path().join("out");
    let out = run(
        &["sweep", "--mode", "file", "--tau", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let records = std::fs::read_to_string(out_dir.join("records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 1);
    assert!(records.contains(&format!("{:016x}", tau.fingerprint())));
}

#[test]
fn verify_and_sabotage() {
    assert_eq!(run(&["verify", "--g1-only"], &[]).status.code(), Some(0));
    let out = run(&["verify", "--g1-only", "--sabotage"], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL oracle-equivalence"));
}

#[test]
fn dumps_are_json() {
    let out = run(&["dump-groups", "--type", "1,2"], &[]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k1"].as_array().unwrap().len(), 8);
    assert_eq!(v["psi"]["bijective"], true);

    let out = run(&["dump-matrix", "--type", "2", "--seed", "1"], &[]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["shape"], serde_json::json!([4, 3]));
    assert_eq!(v["rows"][2]["characteristic"], serde_json::json!(["1/2"]));
    assert_eq!(v["entries"][0].as_array().unwrap().len(), 3);
}
