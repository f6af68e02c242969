//! End-to-end behavior of the `rnsim` binary: exit codes, artifact
//! determinism, and stable CSV headers.

use std::fs;
use std::process::Command;

fn rnsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rnsim"))
}

#[test]
fn ok_run_exits_zero_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let status = rnsim()
        .args(["energy", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    assert!(csv.starts_with("kind,b_dac,b_adc,nModuli,dacEnergyJ,adcEnergyJ,totalJ\n"));
}

#[test]
fn unknown_experiment_name_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "made-up"}"#).unwrap();
    let out = rnsim().args(["dot-error", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mismatched_subcommand_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "energy"}"#).unwrap();
    let out = rnsim().args(["dot-error", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_fields_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "dot-error", "trails": 10}"#).unwrap();
    let out = rnsim().args(["dot-error", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_required_field_exits_two() {
    // infer has no default for the weights path.
    let out = rnsim().args(["infer"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        format!(
            r#"{{"experiment": "infer", "weights": "{}"}}"#,
            dir.path().join("missing.rnst").display()
        ),
    )
    .unwrap();
    let out = rnsim().args(["infer", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn same_seed_gives_byte_identical_artifacts() {
    let cfg = r#"{"experiment": "dot-error", "trials": 200, "h": 16, "bits": 6, "seed": 7}"#;
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("cfg.json");
        fs::write(&cfg_path, cfg).unwrap();
        let status = rnsim()
            .args(["dot-error", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        bytes.push(fs::read(dir.path().join("dot_error.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn seed_flag_overrides_config_seed() {
    let cfg = r#"{"experiment": "dot-error", "trials": 100, "h": 16, "bits": 6, "seed": 7}"#;
    let run = |seed: Option<&str>| {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("cfg.json");
        fs::write(&cfg_path, cfg).unwrap();
        let mut cmd = rnsim();
        cmd.args(["dot-error", "--config"]).arg(&cfg_path).arg("--out").arg(dir.path());
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        assert_eq!(cmd.status().unwrap().code(), Some(0));
        fs::read(dir.path().join("dot_error.csv")).unwrap()
    };
    let base = run(None);
    let same = run(Some("7"));
    let different = run(Some("8"));
    assert_eq!(base, same);
    assert_ne!(base, different);
}

#[test]
fn artifacts_are_identical_across_thread_counts() {
    let cfg = r#"{"experiment": "rrns-mc", "trials": 5000, "p_values": [0.05], "attempts": [1, 2], "seed": 3}"#;
    let run = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("cfg.json");
        fs::write(&cfg_path, cfg).unwrap();
        let status = rnsim()
            .args(["rrns-mc", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(dir.path())
            .env("RNSIM_THREADS", threads)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        fs::read(dir.path().join("rrns_mc.csv")).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn invalid_thread_count_exits_two() {
    let out = rnsim().arg("energy").env("RNSIM_THREADS", "lots").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = rnsim().arg("energy").env("RNSIM_THREADS", "0").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_out_dir_is_used_when_no_flag() {
    let dir = tempfile::tempdir().unwrap();
    let status = rnsim()
        .arg("energy")
        .env("RNSIM_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("energy.csv").exists());
}

#[test]
fn verify_negative_control_fails() {
    // The library-level fault hook must flip the verdict.
    use rnsim_cli::config::ExperimentConfig;
    use rnsim_cli::verify::{run_verify, VerifyOptions};
    use rnsim_cli::RunContext;

    let dir = tempfile::tempdir().unwrap();
    let ExperimentConfig::Verify(cfg) = ExperimentConfig::default_for("verify").unwrap() else {
        panic!()
    };
    let ctx = RunContext { out_dir: dir.path().into(), seed_override: None };
    let report = run_verify(&cfg, &ctx, &VerifyOptions { fault_injection: true }).unwrap();
    assert!(!report.all_passed());
    assert!(report.failing_suites().contains(&"crt-round-trip".to_string()));
}
