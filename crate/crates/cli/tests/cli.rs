use std::path::Path;
use std::process::{Command, Output};

use gkpforge_cli::reports::{
    BudgetReport, ConditionReport, ExtractReport, MilestonesReport, RamseyReport, SolvabilityReport,
};

fn gkpforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkpforge"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("GKPFORGE_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json<T: serde::de::DeserializeOwned>(args: &[&str]) -> T {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = gkpforge(&full);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn budget_scenarios() {
    let cur: BudgetReport = json(&["budget"]);
    assert!((0.7e-13..=2e-13).contains(&cur.budget.combined()));
    assert_eq!(cur.budget.dominant, "IV. TNP");
    assert_eq!(cur.manifest.command, "budget");
    assert_eq!(cur.manifest.timestamp, "2023-11-14T22:13:20Z");
    assert!(cur.manifest.inputs.iter().all(|i| i.sha256.len() == 64));
    let proj: BudgetReport = json(&["budget", "--scenario", "projected"]);
    assert!((0.7e-14..=2e-14).contains(&proj.budget.combined()));
    assert!(proj.chi_bound < cur.chi_bound);
}

#[test]
fn budget_table_prints_sum_and_max() {
    let o = gkpforge(&["budget"]);
    let text = stdout(&o);
    assert!(text.contains("Combined residual (current): 1.66667e-13 eV"));
    assert!(text.contains("Largest single residual (current): 1.00000e-13 eV"));
}

#[test]
fn budget_rejects_bad_scenario_and_missing_anchors() {
    let o = gkpforge(&["budget", "--scenario", "someday"]);
    assert_eq!(o.status.code(), Some(2));
    let o = gkpforge(&["budget", "--anchors", "/nonexistent/anchors.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/anchors.json"));
}

#[test]
fn solvability_verdicts() {
    let r: SolvabilityReport = json(&["solvability"]);
    let verdicts: Vec<_> = r
        .rows
        .iter()
        .map(|r| r.solvability.verdict.as_str())
        .collect();
    assert_eq!(
        verdicts,
        ["No (2 < 3)", "Yes (3 = 3)", "Yes (4 > 3)", "Yes (6 ≫ 3)"]
    );
    assert_eq!(r.requested.solvability.verdict, "No (2 < 3)");

    let r: SolvabilityReport = json(&["solvability", "--add-isotope", "91"]);
    assert_eq!(r.requested.solvability.verdict, "Yes (3 = 3)");
    assert_eq!(r.requested.added_isotopes, [91]);
    let r: SolvabilityReport = json(&["solvability", "--transitions", "2"]);
    assert_eq!(r.requested.solvability.verdict, "Yes (4 > 3)");
}

#[test]
fn solvability_rejects_unknown_isotope() {
    let o = gkpforge(&["solvability", "--add-isotope", "150"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn extract_refuses_stable_only() {
    let o = gkpforge(&["extract", "--rhs", "bundled:extract-stable-only-v1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("N_odd ≥ 3"));
}

#[test]
fn extract_noiseless_recovers_truth() {
    let r: ExtractReport = json(&["extract", "--rhs", "bundled:extract-noiseless-v1"]);
    let truth = r.truth.unwrap();
    assert!((r.result.alpha_manko_hat.value - truth[2]).abs() < 1e-10);
    assert_eq!(r.columns.len(), 3);
}

#[test]
fn extract_missing_file() {
    let o = gkpforge(&["extract", "--rhs", "/nonexistent/rhs.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/rhs.json"));
}

#[test]
fn condition_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "--out",
        out,
        "--seed",
        "17",
        "condition",
        "--samples",
        "3000",
    ];
    let a = gkpforge(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let first = std::fs::read(Path::new(out).join("condition.json")).unwrap();
    let hist = std::fs::read_to_string(Path::new(out).join("kappa-histogram.csv")).unwrap();
    assert!(hist.starts_with("bin,low,high,count\n"));
    let b = gkpforge(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        first,
        std::fs::read(Path::new(out).join("condition.json")).unwrap()
    );

    let seq = gkpforge(&[
        "--seed",
        "17",
        "--format",
        "json",
        "condition",
        "--samples",
        "3000",
        "--sequential",
    ]);
    let par = gkpforge(&[
        "--seed",
        "17",
        "--format",
        "json",
        "condition",
        "--samples",
        "3000",
    ]);
    let seq: ConditionReport = serde_json::from_str(&stdout(&seq)).unwrap();
    let par: ConditionReport = serde_json::from_str(&stdout(&par)).unwrap();
    assert_eq!(seq.summary, par.summary);
    assert_eq!(par.manifest.seed, Some(17));
}

#[test]
fn milestones_lookup() {
    let r: MilestonesReport = json(&["milestones", "--target", "1e-16"]);
    let l = r.lookup.unwrap();
    assert_eq!(l.row.sensitivity_ev, 1e-16);
    assert_eq!(l.era.label(), "electromagnetic subtraction");
    let o = gkpforge(&["milestones", "--target", "1e-30"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ramsey_optimum() {
    let o = gkpforge(&["ramsey", "--half-life", "930s"]);
    assert!(stdout(&o).contains("6.70853e2"));
    let r: RamseyReport = json(&["ramsey", "--half-life", "15.5min", "--tr", "2000s"]);
    assert_eq!(r.plan.t_r_used_s, r.plan.t_r_opt_s.unwrap());
    assert!(!r.plan.warnings.is_empty());
}

#[test]
fn csv_format() {
    let o = gkpforge(&["--format", "csv", "solvability"]);
    assert!(stdout(&o).starts_with("topology,n_ee,n_odd"));
}

#[test]
fn chain_override_and_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = gkpforge(&[
        "--chain",
        dir.path().join("missing.csv").to_str().unwrap(),
        "budget",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.csv"));

    // A data directory shadows bundled files of the same name.
    let ladder = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/data/milestones-v1.json"
    ))
    .unwrap()
    .replace("milestones-v1\"", "milestones-local\"");
    std::fs::write(dir.path().join("milestones-v1.json"), ladder).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gkpforge"))
        .args(["--format", "json", "milestones"])
        .env("GKPFORGE_DATA_DIR", dir.path())
        .output()
        .unwrap();
    let r: MilestonesReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.ladder.version, "milestones-local");
}
