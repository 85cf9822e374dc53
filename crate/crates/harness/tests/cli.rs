use std::fs;
use std::process::Command;

fn lqgsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lqgsim"))
}

#[test]
fn runs_an_experiment_and_reports_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = lqgsim()
        .args(["qle", "hitting-rule", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let record = dir.path().join("qle-hitting-rule.json");
    let report_dir = dir.path().join("report");
    let out = lqgsim().arg("report").arg(&record).arg("--out").arg(&report_dir).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(report_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(doc["overall"], "PASS");
    assert!(report_dir.join("report.txt").exists());
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out_dir = dir.path().join("from_config");
    fs::write(
        &cfg,
        serde_json::json!({"id": "levy-jump-ratio", "seed": 3, "n": 4, "out": out_dir}).to_string(),
    )
    .unwrap();
    // four samples give a noisy ratio, so the verdict may be either way
    let first = lqgsim().args(["levy", "--config"]).arg(&cfg).output().unwrap();
    assert_ne!(first.status.code(), Some(2), "{}", String::from_utf8_lossy(&first.stderr));
    let by_config = fs::read(out_dir.join("levy-jump-ratio.csv")).unwrap();

    let flag_dir = dir.path().join("from_flags");
    let out = lqgsim()
        .args(["levy", "jump-ratio", "--seed", "3", "--n", "4", "--out"])
        .arg(&flag_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), first.status.code());
    assert_eq!(fs::read(flag_dir.join("levy-jump-ratio.csv")).unwrap(), by_config);
}

#[test]
fn errors_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = lqgsim().args(["csbp", "nothing", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("csbp-laplace"));
    let out = lqgsim()
        .args(["csbp", "laplace", "-p", "y0=-1", "--n", "5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = lqgsim().args(["levy", "--config", "/nonexistent.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // a config naming another module's experiment is refused
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"id": "csbp-laplace"}"#).unwrap();
    let out = lqgsim().args(["levy", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("belongs to `csbp`"));
}
