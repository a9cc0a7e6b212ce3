//! End-to-end runs of the `sir-rate` binary.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sir_rate(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sir-rate"))
        .args(args)
        .arg("--quiet")
        .env("SIR_RATE_OUTPUT_DIR", dir)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = sir_rate(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn manifest(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_removals(dir: &Path, times: &[f64]) -> String {
    let text: String = times.iter().map(|t| format!("{t}\n")).collect();
    std::fs::write(dir.join("r.csv"), text).unwrap();
    "r.csv".into()
}

#[test]
fn zero_infection_rate_gives_a_single_removal() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--beta", "0", "--n", "50"]);
    let csv = std::fs::read_to_string(dir.path().join("removals.csv")).unwrap();
    assert_eq!(csv.lines().skip(1).collect::<Vec<_>>(), vec!["0"]);
    assert!(dir.path().join("truth.json").exists());
    assert!(dir.path().join("simulate.manifest.json").exists());
}

#[test]
fn simulation_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        ok(d.path(), &["simulate", "--n", "200", "--beta", "0.01", "--seed", "4", "--seasonal"]);
    }
    let digests = |d: &TempDir| manifest(&d.path().join("simulate.manifest.json"))["outputs"].clone();
    let (da, db) = (digests(&a), digests(&b));
    assert_eq!(da[0]["sha256"], db[0]["sha256"]);
    assert_eq!(da[1]["sha256"], db[1]["sha256"]);
}

#[test]
fn dataset_one_flags_give_a_major_outbreak() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--n", "1000", "--beta", "1.7e-3", "--gamma", "1", "--seed", "1"]);
    let m = manifest(&dir.path().join("simulate.manifest.json"));
    let size = m["stats"]["final_size"].as_u64().unwrap();
    // R0 = 1.7 gives an expected major-outbreak size near 690.
    assert!((500..=850).contains(&size), "final size {size}");
}

#[test]
fn zero_iterations_write_manifest_and_empty_stream() {
    let dir = TempDir::new().unwrap();
    let data = write_removals(dir.path(), &[0.0, 1.0, 3.0]);
    ok(dir.path(), &["fit", "--data", &data, "--model", "step-indep", "--iterations", "0", "--burn-in", "0"]);
    assert_eq!(std::fs::read_to_string(dir.path().join("posterior.jsonl")).unwrap(), "");
    let m = manifest(&dir.path().join("posterior.manifest.json"));
    assert_eq!(m["command"], "fit");
    assert_eq!(m["inputs"][0]["path"], "r.csv");
}

#[test]
fn fixed_seed_reproduces_the_stream() {
    let dir = TempDir::new().unwrap();
    write_removals(dir.path(), &[0.0, 0.4, 1.0, 1.1, 2.5, 3.0]);
    let args = |name: &'static str| {
        vec!["fit", "--data", "r.csv", "--model", "bspline", "--iterations", "3000", "--seed", "12", "--name", name]
    };
    ok(dir.path(), &args("a"));
    ok(dir.path(), &args("b"));
    let a = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    let b = std::fs::read(dir.path().join("b.jsonl")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let (ma, mb) = (manifest(&dir.path().join("a.manifest.json")), manifest(&dir.path().join("b.manifest.json")));
    assert_eq!(ma["config_sha256"], mb["config_sha256"]);
    assert_eq!(ma["outputs"][0]["sha256"], mb["outputs"][0]["sha256"]);
}

#[test]
fn manifest_config_reruns_exactly() {
    let dir = TempDir::new().unwrap();
    write_removals(dir.path(), &[0.0, 0.5, 0.9, 2.0]);
    ok(dir.path(), &["fit", "--data", "r.csv", "--model", "step-martingale", "--iterations", "2000", "--seed", "3", "--name", "first"]);
    let m = manifest(&dir.path().join("first.manifest.json"));
    std::fs::write(dir.path().join("cfg.json"), m["config"].to_string()).unwrap();
    ok(dir.path(), &["fit", "--data", "r.csv", "--config", "cfg.json", "--name", "again"]);
    let again = manifest(&dir.path().join("again.manifest.json"));
    assert_eq!(m["config_sha256"], again["config_sha256"]);
    assert_eq!(m["outputs"][0]["sha256"], again["outputs"][0]["sha256"]);
}

#[test]
fn sars_style_prior_flags_are_accepted() {
    let dir = TempDir::new().unwrap();
    write_removals(dir.path(), &[0.0, 1.0, 1.5, 4.0]);
    ok(dir.path(), &[
        "fit", "--data", "r.csv", "--model", "step-indep", "--lambda", "20", "--kmax", "100", "--kappa-gamma", "n",
        "--mu-gamma", "4.6n", "--iterations", "500", "--burn-in", "100",
    ]);
    let m = manifest(&dir.path().join("posterior.manifest.json"));
    assert_eq!(m["config"]["kappa_gamma"], "n");
    assert_eq!(m["config"]["mu_gamma"], "4.6n");
    assert_eq!(m["config"]["k_max"], 100);
}

#[test]
fn chains_get_separate_outputs_and_seeds() {
    let dir = TempDir::new().unwrap();
    write_removals(dir.path(), &[0.0, 1.0, 1.5, 4.0]);
    ok(dir.path(), &["fit", "--data", "r.csv", "--chains", "3", "--iterations", "1000", "--burn-in", "100"]);
    let streams: Vec<Vec<u8>> =
        (0..3).map(|c| std::fs::read(dir.path().join(format!("posterior.chain{c}.jsonl"))).unwrap()).collect();
    assert_ne!(streams[0], streams[1]);
    assert_ne!(streams[1], streams[2]);
    let m = manifest(&dir.path().join("posterior.manifest.json"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 3);
    assert_eq!(m["timings"]["per_chain_secs"].as_array().unwrap().len(), 3);
}

#[test]
fn mass_action_fit_and_summary() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--n", "100", "--beta", "0.02", "--seed", "2"]);
    ok(dir.path(), &["fit", "--data", "removals.csv", "--model", "mass-action", "--population", "101", "--iterations", "2000"]);
    ok(dir.path(), &["summarize", "--input", "posterior.jsonl", "--removals", "removals.csv", "--truth", "truth.json", "--grid", "50"]);
    let csv = std::fs::read_to_string(dir.path().join("bands.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,q05,q50,q95,truth,covered");
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn identical_samples_give_flat_equal_bands() {
    let dir = TempDir::new().unwrap();
    let line = r#"{"iter":1,"gamma":1.0,"mu":null,"rate":{"type":"step","k":0,"start":-1.0,"end":2.0,"s":[],"h":[0.75]},"I_omega":-1.0,"omega":0,"loglik":0.0}"#;
    std::fs::write(dir.path().join("p.jsonl"), format!("{line}\n{line}\n{line}\n")).unwrap();
    ok(dir.path(), &["summarize", "--input", "p.jsonl", "--grid", "9"]);
    let csv = std::fs::read_to_string(dir.path().join("bands.csv")).unwrap();
    for row in csv.lines().skip(1) {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[1], 0.75);
        assert_eq!(v[1], v[2]);
        assert_eq!(v[2], v[3]);
    }
}

#[test]
fn per_infective_toy_matches_hand_calculation() {
    let dir = TempDir::new().unwrap();
    // Infections at -1 and 0.5, removals at 0 and 2: one infective on
    // [-1, 0) and [0.5, 2), none on [0, 0.5).
    write_removals(dir.path(), &[0.0, 2.0]);
    let line = r#"{"iter":1,"gamma":1.0,"mu":null,"rate":{"type":"step","k":1,"start":-1.0,"end":2.0,"s":[1.0],"h":[2.0,4.0]},"I_omega":-1.0,"omega":0,"loglik":0.0,"infections":[-1.0,0.5]}"#;
    std::fs::write(dir.path().join("p.jsonl"), format!("{line}\n")).unwrap();
    ok(dir.path(), &["summarize", "--input", "p.jsonl", "--removals", "r.csv", "--per-infective", "--grid", "7"]);
    let csv = std::fs::read_to_string(dir.path().join("bands.csv")).unwrap();
    let medians: Vec<f64> = csv.lines().skip(1).map(|r| r.split(',').nth(2).unwrap().parse().unwrap()).collect();
    // Grid -1, -0.5, 0, 0.5, 1, 1.5, 2. Y is right-continuous, so the
    // removal at 2 leaves nobody infective there.
    assert_eq!(medians, vec![2.0, 2.0, 0.0, 2.0, 4.0, 4.0, 0.0]);
}

#[test]
fn burn_in_and_thin_select_samples() {
    let dir = TempDir::new().unwrap();
    let lines: String = (1..=10)
        .map(|i| {
            format!(
                r#"{{"iter":{i},"gamma":1.0,"mu":null,"rate":{{"type":"step","k":0,"start":0.0,"end":1.0,"s":[],"h":[{i}.0]}},"I_omega":0.0,"omega":0,"loglik":0.0}}"#
            ) + "\n"
        })
        .collect();
    std::fs::write(dir.path().join("p.jsonl"), lines).unwrap();
    ok(dir.path(), &["summarize", "--input", "p.jsonl", "--burn-in", "5", "--thin", "2", "--grid", "3"]);
    let m = manifest(&dir.path().join("bands.manifest.json"));
    // Iterations 5..=10 survive burn-in; thinning keeps 5, 7 and 9.
    assert_eq!(m["stats"]["samples"], 3);
    let csv = std::fs::read_to_string(dir.path().join("bands.csv")).unwrap();
    assert_eq!(csv.lines().nth(2).unwrap().split(',').nth(2).unwrap(), "7");
}

#[test]
fn empty_stream_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("p.jsonl"), "").unwrap();
    let out = sir_rate(dir.path(), &["summarize", "--input", "p.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes_follow_the_failure_class() {
    let dir = TempDir::new().unwrap();
    assert_eq!(sir_rate(dir.path(), &["fit", "--data", "r.csv", "--model", "nope"]).status.code(), Some(1));
    assert_eq!(sir_rate(dir.path(), &["simulate", "--beta", "-1"]).status.code(), Some(1));
    assert_eq!(sir_rate(dir.path(), &["fit", "--data", "missing.csv"]).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.csv"), "t\n1\nabc\n").unwrap();
    assert_eq!(sir_rate(dir.path(), &["fit", "--data", "bad.csv"]).status.code(), Some(2));
    write_removals(dir.path(), &[0.0, 1.0]);
    assert_eq!(sir_rate(dir.path(), &["fit", "--data", "r.csv", "--lambda", "-2"]).status.code(), Some(1));
    assert_eq!(sir_rate(dir.path(), &["fit", "--data", "r.csv", "--model", "mass-action"]).status.code(), Some(1));
    assert_eq!(sir_rate(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn output_directory_flag_beats_environment() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--beta", "0", "--n", "5", "--out-dir", "sub"]);
    assert!(dir.path().join("sub/removals.csv").exists());
    assert!(!dir.path().join("removals.csv").exists());
}

#[test]
fn prior_validation_passes_and_reports() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["validate-prior", "--model", "step-indep", "--lambda", "3", "--kmax", "20"]);
    let report = manifest(&dir.path().join("prior_check.json"));
    assert!(report["k_tv"].as_f64().unwrap() < 0.05);
    assert_eq!(report["mode_k"], 3);
    assert_eq!(report["k_pmf_chain"].as_array().unwrap().len(), 21);
}

#[test]
fn prior_validation_fails_on_too_short_a_chain() {
    let dir = TempDir::new().unwrap();
    // A handful of correlated draws cannot reproduce the k distribution.
    let out = sir_rate(
        dir.path(),
        &["validate-prior", "--model", "bspline", "--lambda", "10", "--kmax", "50", "--iterations", "300", "--burn-in", "0", "--thin", "1"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_prior_mode_for_lambda_ten() {
    let dir = TempDir::new().unwrap();
    let out = sir_rate(
        dir.path(),
        &["validate-prior", "--lambda", "10", "--kmax", "50", "--iterations", "20000", "--burn-in", "1000", "--thin", "10"],
    );
    assert!(out.status.code().is_some());
    let report = manifest(&dir.path().join("prior_check.json"));
    // Poisson(10) has tied modes at 9 and 10; the pmf ties break upward.
    let k = report["mode_k"].as_u64().unwrap();
    assert!(k == 9 || k == 10);
    let pmf = report["k_pmf_chain"].as_array().unwrap();
    assert_eq!(pmf.len(), 51);
}
