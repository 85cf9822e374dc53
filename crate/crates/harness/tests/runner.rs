use std::fs;

use lqgsim_core::levy::{check_exponential_integral, check_laplace_functional, StableLaw};
use lqgsim_harness::{
    read_rows, registry, report, run_experiment, Check, ExperimentConfig, HarnessError, RunRecord, Tolerance,
    Verdict, RECORD_SCHEMA, ROWS_SCHEMA,
};

fn config(dir: &tempfile::TempDir, id: &str) -> ExperimentConfig {
    ExperimentConfig::new(id).with_out(dir.path())
}

#[test]
fn same_config_gives_byte_identical_rows() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (id, n) in [("csbp-laplace", Some(300)), ("levy-jump-ratio", Some(5)), ("qle-bookkeeping", Some(20))] {
        let mut ca = config(&a, id);
        let mut cb = config(&b, id);
        ca.n_samples = n;
        cb.n_samples = n;
        let ra = run_experiment(&ca).unwrap();
        let rb = run_experiment(&cb).unwrap();
        assert_eq!(ra.rows, rb.rows);
        let fa = fs::read(ra.config.csv_path()).unwrap();
        let fb = fs::read(rb.config.csv_path()).unwrap();
        assert_eq!(fa, fb, "{id}");
    }
}

#[test]
fn seed_changes_samples_but_not_schema() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = run_experiment(&config(&dir, "csbp-laplace").with_n(50)).unwrap();
    let t1 = read_rows(&r1.config.csv_path()).unwrap();
    let r2 = run_experiment(&config(&dir, "csbp-laplace").with_n(50).with_seed(2)).unwrap();
    let t2 = read_rows(&r2.config.csv_path()).unwrap();
    assert_eq!(t1.columns, t2.columns);
    assert_eq!(t1.len(), t2.len());
    assert_ne!(t1.rows, t2.rows);
    assert_eq!(t2, r2.rows);
    let text = fs::read_to_string(r2.config.csv_path()).unwrap();
    assert!(text.starts_with(&format!("# schema={ROWS_SCHEMA} experiment=csbp-laplace seed=2\n")));
}

#[test]
fn rows_agree_with_the_library_checks() {
    let dir = tempfile::tempdir().unwrap();
    let law = StableLaw::three_halves();
    let r = run_experiment(&config(&dir, "csbp-laplace").with_n(400).with_seed(9)).unwrap();
    let lib = check_laplace_functional(&law, 1.0, 0.5, 2.0, 400, 9).unwrap();
    assert_eq!(r.checks[0].estimate, Some(lib.estimate));
    assert_eq!(r.checks[0].target, lib.target);
    let r = run_experiment(&config(&dir, "csbp-exp-integral").with_n(200).with_seed(4)).unwrap();
    let lib = check_exponential_integral(&law, 1.0, 1.0, 200, 4).unwrap();
    assert_eq!(r.checks[0].estimate, Some(lib.estimate));
    assert_eq!(r.rows.len(), 200);
}

#[test]
fn unknown_id_lists_registered_ids() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_experiment(&config(&dir, "levy-nothing")).unwrap_err();
    assert!(matches!(err, HarnessError::UnknownExperiment { .. }));
    let msg = err.to_string();
    for e in registry() {
        assert!(msg.contains(e.id), "{msg}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn parameters_are_validated_before_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        config(&dir, "csbp-laplace").with_param("lamda", 2.0),
        config(&dir, "csbp-laplace").with_param("t", "half"),
        config(&dir, "csbp-laplace").with_n(0),
        config(&dir, "qle-hitting-rule").with_n(10),
        config(&dir, "levy-jump-ratio").with_param("threshold", 0.5),
        config(&dir, "maps-eden-percolation").with_param("class", "TRIANGULAR"),
    ];
    for c in bad {
        let err = run_experiment(&c).unwrap_err();
        assert!(
            matches!(err, HarnessError::Param { .. } | HarnessError::Maps { .. }),
            "{}: {err}",
            c.id
        );
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn module_errors_carry_the_experiment_and_leave_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_experiment(&config(&dir, "csbp-laplace").with_n(10).with_param("y0", -1.0)).unwrap_err();
    assert!(matches!(err, HarnessError::Core { .. }));
    assert!(err.to_string().contains("csbp-laplace"), "{err}");
    assert!(!dir.path().join("csbp-laplace.csv").exists());
}

#[test]
fn partial_output_is_removed_when_a_write_fails() {
    let dir = tempfile::tempdir().unwrap();
    // a directory where the record should go makes the second write fail
    fs::create_dir(dir.path().join("qle-hitting-rule.json")).unwrap();
    let err = run_experiment(&config(&dir, "qle-hitting-rule")).unwrap_err();
    assert!(matches!(err, HarnessError::Io { .. }), "{err}");
    assert!(!dir.path().join("qle-hitting-rule.csv").exists());
}

#[test]
fn records_round_trip_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_experiment(&config(&dir, "qle-hitting-rule")).unwrap();
    let loaded = RunRecord::load(&r.config.json_path()).unwrap();
    assert_eq!(loaded.schema, RECORD_SCHEMA);
    assert_eq!(loaded.checks, r.checks);
    assert_eq!(loaded.n_rows, r.rows.len());
    let doc = report(&[loaded]).unwrap();
    assert_eq!(doc.rows.len(), 1);
    assert_eq!(doc.rows[0].verdict, Verdict::Pass);
    assert_eq!(doc.overall, Verdict::Pass);
    assert!(doc.to_text().contains("PASS"));
    let json: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
    assert_eq!(json["overall"], "PASS");

    let path = r.config.json_path();
    let text = fs::read_to_string(&path).unwrap().replace(RECORD_SCHEMA, "lqgsim.run.v0");
    fs::write(&path, text).unwrap();
    assert!(matches!(RunRecord::load(&path), Err(HarnessError::SchemaMismatch { .. })));
}

fn record_with(checks: Vec<Check>) -> RunRecord {
    let dir = tempfile::tempdir().unwrap();
    let mut r = run_experiment(&config(&dir, "qle-hitting-rule")).unwrap();
    r.verdict = Verdict::combine(checks.iter().map(|c| c.verdict));
    r.checks = checks;
    r
}

#[test]
fn report_verdicts() {
    let pass = Check::new("a", 1.0, Some(1.0), Tolerance::Exact);
    let fail = Check::new("b", 1.0, Some(2.0), Tolerance::Exact);
    let empty = Check::new("c", 1.0, None, Tolerance::Exact);
    let censored = Check::new("d", 1.0, Some(1.0), Tolerance::Exact).censored(true);

    let mixed = report(&[record_with(vec![pass.clone()]), record_with(vec![fail])]).unwrap();
    assert_eq!(mixed.overall, Verdict::Fail);
    assert_eq!(mixed.rows[0].verdict, Verdict::Pass);
    assert_eq!(mixed.rows[1].verdict, Verdict::Fail);

    let open = report(&[record_with(vec![empty, censored])]).unwrap();
    assert!(open.rows.iter().all(|r| r.verdict == Verdict::Inconclusive));
    assert_eq!(open.overall, Verdict::Inconclusive);
    assert!(open.to_text().contains("INCONCLUSIVE"));

    let mut other = record_with(vec![pass.clone()]);
    other.schema = "lqgsim.run.v0".into();
    let err = report(&[record_with(vec![pass]), other]).unwrap_err();
    assert!(matches!(err, HarnessError::SchemaMismatch { .. }));
    assert!(matches!(report(&[]), Err(HarnessError::EmptyReport)));
}
