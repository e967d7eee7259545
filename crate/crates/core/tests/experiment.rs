use std::fs;
use std::path::Path;

use kfrac::config::{parse_config, ExperimentConfig};
use kfrac::experiment::{
    compare_artifacts, convergence_study, load_config, read_manifest, run_experiment, verify_stored, RunStatus,
    StudyKind, FAILED_FILE, MANIFEST_FILE,
};
use kfrac::verification::{CheckId, Verdict};
use kfrac::Error;

const SCENARIOS: [(&str, &str); 7] = [
    ("minimal", include_str!("../../../scenarios/minimal.toml")),
    ("linear_oracle", include_str!("../../../scenarios/linear_oracle.toml")),
    ("nonlinear_reference", include_str!("../../../scenarios/nonlinear_reference.toml")),
    ("zero_data", include_str!("../../../scenarios/zero_data.toml")),
    ("infeasible_h2", include_str!("../../../scenarios/infeasible_h2.toml")),
    ("holder", include_str!("../../../scenarios/holder.toml")),
    ("fem_integral", include_str!("../../../scenarios/fem_integral.toml")),
];

fn scenario(name: &str, dir: &Path) -> ExperimentConfig {
    let text = SCENARIOS.iter().find(|(n, _)| *n == name).unwrap().1;
    let mut c = parse_config(text).unwrap();
    c.output.dir = dir.to_path_buf();
    c
}

fn aborting(dir: &Path) -> ExperimentConfig {
    let text = format!(
        r#"
[problem]
alpha = 0.5
s = 0.5
modes = 16
[problem.initial]
kind = "parabola"
[solver]
n_steps = 64
corrector = "explicit"
corrector_iterations = 20
[checks]
run = ["h2", "apriori_1"]
[output]
dir = "{}"
"#,
        dir.display()
    );
    parse_config(&text).unwrap()
}

#[test]
fn every_scenario_parses() {
    for (name, text) in SCENARIOS {
        parse_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn zero_data_emits_all_files_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&scenario("zero_data", dir.path())).unwrap();
    assert!(out.success());
    for f in ["norms.csv", "coefficients.csv", "report.json", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert_eq!(out.report.records.len(), 7);
}

#[test]
fn linear_oracle_report_is_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&scenario("linear_oracle", dir.path())).unwrap();
    let r = out.report.record(CheckId::LinearOracle).unwrap();
    assert!(r.values["max_abs"] <= 1e-3, "{:?}", r.values);
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(out.success());
}

#[test]
fn infeasible_data_fail_with_the_margin_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&scenario("infeasible_h2", dir.path())).unwrap();
    assert!(!out.success());
    assert_eq!(out.report.status, RunStatus::Completed);
    let r = out.report.record(CheckId::H2).unwrap();
    let expected = 1.0 - 4.0 * std::f64::consts::PI;
    assert!((r.values["margin"] - expected).abs() < 1e-12, "{:?}", r.values);
}

#[test]
fn solver_abort_keeps_partial_artifacts_with_a_marker() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&aborting(dir.path())).unwrap();
    assert!(!out.success());
    assert_eq!(out.report.status, RunStatus::Failed);
    assert!(out.report.nodes_completed < out.report.nodes_total);
    let marker = fs::read_to_string(dir.path().join(FAILED_FILE)).unwrap();
    assert!(marker.contains("diverging"), "{marker}");
    let rows = fs::read_to_string(dir.path().join("coefficients.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + out.report.nodes_completed);
    assert_eq!(out.report.record(CheckId::H2).unwrap().verdict, Verdict::Pass);
    assert_eq!(out.report.record(CheckId::Apriori1).unwrap().verdict, Verdict::Fail);

    let mut fixed = aborting(dir.path());
    fixed.solver.corrector = Default::default();
    assert!(run_experiment(&fixed).unwrap().success());
    assert!(!dir.path().join(FAILED_FILE).exists());
}

#[test]
fn no_verdict_without_numbers() {
    for (name, _) in SCENARIOS {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&scenario(name, dir.path())).unwrap();
        for r in &out.report.records {
            assert!(!r.values.is_empty(), "{name}: {:?} has no values", r.id);
            assert!(!r.anchor.is_empty());
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&aborting(dir.path())).unwrap();
    assert!(out.report.records.iter().all(|r| !r.values.is_empty()));
}

#[test]
fn report_carries_the_memory_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&scenario("nonlinear_reference", dir.path())).unwrap();
    let c = &out.report.constants;
    // β + sup|g|·‖h‖/λ₁ with g ≤ 1, h ≡ 1 on (0,1), λ₁ = π.
    assert!((c["b0_constant"] - (0.05 + 1.0 / std::f64::consts::PI)).abs() < 1e-12, "{c:?}");
    assert!(c["memory_to_laplacian_constant"] > 0.0);
}

#[test]
fn manifest_replay_reproduces_every_table() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_experiment(&scenario("fem_integral", a.path())).unwrap();
    let mut replay = load_config(&a.path().join(MANIFEST_FILE)).unwrap();
    replay.output.dir = b.path().to_path_buf();
    let second = run_experiment(&replay).unwrap();
    assert_eq!(first.manifest.artifacts, second.manifest.artifacts);
    assert_eq!(first.manifest.config_sha256, second.manifest.config_sha256);
    let manifest = read_manifest(&a.path().join(MANIFEST_FILE)).unwrap();
    assert!(compare_artifacts(&manifest, b.path()).unwrap().is_empty());
}

#[test]
fn tampered_artifacts_are_detected() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&scenario("minimal", dir.path())).unwrap();
    let manifest = read_manifest(&dir.path().join(MANIFEST_FILE)).unwrap();
    let path = dir.path().join("norms.csv");
    let mut text = fs::read_to_string(&path).unwrap();
    text.push('\n');
    fs::write(&path, text).unwrap();
    assert_eq!(compare_artifacts(&manifest, dir.path()).unwrap(), vec!["norms.csv".to_string()]);
}

#[test]
fn verify_matches_the_run_report() {
    let dir = tempfile::tempdir().unwrap();
    let c = scenario("nonlinear_reference", dir.path());
    let out = run_experiment(&c).unwrap();
    let again = verify_stored(&c).unwrap();
    assert_eq!(out.report.records, again.records);
}

#[test]
fn verify_rejects_a_history_from_another_grid() {
    let dir = tempfile::tempdir().unwrap();
    let c = scenario("minimal", dir.path());
    run_experiment(&c).unwrap();
    let mut other = c.clone();
    other.solver.t_final = 2.0;
    assert!(matches!(verify_stored(&other), Err(Error::Contract { .. })));
}

#[test]
fn linear_study_observes_order_above_one_and_a_fifth() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = scenario("linear_oracle", dir.path());
    c.solver.n_steps = 256;
    let t = convergence_study(&c, &[1, 2, 4, 8]).unwrap();
    assert_eq!(t.kind, StudyKind::Oracle);
    assert!(!t.degenerate);
    for row in &t.rows[1..] {
        assert!(row.order_late.unwrap() >= 1.2, "{row:?}");
    }
}

#[test]
fn nonlinear_study_self_converges_at_first_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = scenario("nonlinear_reference", dir.path());
    c.solver.n_steps = 256;
    let t = convergence_study(&c, &[1, 2, 4, 8]).unwrap();
    assert_eq!(t.kind, StudyKind::SelfConvergence);
    assert_eq!(t.rows.len(), 3);
    for row in &t.rows[1..] {
        assert!(row.order_late.unwrap() >= 1.0, "{row:?}");
    }
}

#[test]
fn constant_solution_study_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let t = convergence_study(&scenario("zero_data", dir.path()), &[1, 2, 4, 8]).unwrap();
    assert!(t.degenerate);
    assert!(t.rows.iter().all(|r| r.order.is_none() && r.order_late.is_none()));
}
