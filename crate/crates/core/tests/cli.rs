use std::path::Path;
use std::process::Command;

use abtof::analysis::{fit_delay_vs_current, DelayCurve, Verdict};
use abtof::commands::{cmd_phase_check, cmd_predict_delay, cmd_simulate, cmd_verify_force, exit_code, Outcome};
use abtof::config::RunConfig;
use abtof::experiment::ForceMode;

fn abtof(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_abtof")).args(args).output().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records().map(|r| r.unwrap().iter().map(str::to_owned).collect()).collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn verify_force_short_stack_fails_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.force_check.stack_length_over_radius = vec![2.0];
    let r = cmd_verify_force(&cfg, tmp.path());
    assert_eq!(exit_code(&r), 2);
    let rows = csv_rows(&tmp.path().join("force_convergence.csv"));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][2].parse::<f64>().unwrap() > 0.01);
}

#[test]
fn verify_force_loose_tolerance_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.force_check.max_rel_error = 1.0;
    cfg.force_check.stack_length_over_radius = vec![20.0, 40.0];
    assert_eq!(exit_code(&cmd_verify_force(&cfg, tmp.path())), 0);
}

#[test]
fn predict_delay_zero_current_row() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.sweep.currents_a = vec![0.0];
    assert_eq!(exit_code(&cmd_predict_delay(&cfg, tmp.path())), 0);
    let rows = csv_rows(&tmp.path().join("predict_delay.csv"));
    assert_eq!(rows.len(), 1);
    for v in &rows[0] {
        assert_eq!(v.parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn predict_delay_one_milliamp() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.sweep.currents_a = vec![1e-3];
    cmd_predict_delay(&cfg, tmp.path()).unwrap();
    let rows = csv_rows(&tmp.path().join("predict_delay.csv"));
    let delay: f64 = rows[0][2].parse().unwrap();
    assert!((delay / 3.47e-11 - 1.0).abs() < 2e-3, "{delay}");
}

#[test]
fn simulate_outputs_and_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig { seed: 7, mode: ForceMode::ForcePresent, ..RunConfig::default() };
    assert_eq!(exit_code(&cmd_simulate(&cfg, tmp.path())), 0);
    let fit = json(&tmp.path().join("fit.json"));
    assert_eq!(fit["verdict"], "consistent_eq4");
    assert_eq!(fit.as_object().unwrap().len(), 6);
    let spectra = csv_rows(&tmp.path().join("spectra.csv"));
    assert_eq!(spectra.len(), cfg.sweep.currents_a.len() * cfg.apparatus.shots_per_setting);
    let hist = json(&tmp.path().join("histograms.json"));
    let hist = hist.as_array().unwrap();
    assert_eq!(hist.len(), cfg.sweep.currents_a.len());
    assert!(tmp.path().join("ballistic_fit.json").exists());

    let zero = tmp.path().join("zero");
    cfg.mode = ForceMode::ForceAbsent;
    assert_eq!(exit_code(&cmd_simulate(&cfg, &zero)), 0);
    assert_eq!(json(&zero.join("fit.json"))["verdict"], "consistent_zero");
}

#[test]
fn half_slope_curve_excludes_both() {
    let currents: Vec<f64> = (0..10).map(|i| i as f64 * 1e-3).collect();
    let eq4 = 3.47e-8;
    let curve = DelayCurve {
        measured_delays: currents.iter().map(|i| 0.5 * eq4 * i).collect(),
        delay_errors: vec![1.4e-11; currents.len()],
        currents,
    };
    let report = fit_delay_vs_current(&curve, eq4).unwrap();
    assert_eq!(report.verdict, Verdict::ExcludesBoth);
    let out = Ok(Outcome { exit_code: 3, summary: vec![] });
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn phase_check_zero_flux_row() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.phase_check.energies_ev = vec![40.0];
    cfg.phase_check.currents_a = vec![0.0, 1e-3];
    assert_eq!(exit_code(&cmd_phase_check(&cfg, tmp.path())), 0);
    let report = json(&tmp.path().join("phase_check.json"));
    let rows = report["rows"].as_array().unwrap();
    let zero: Vec<_> = rows.iter().filter(|r| r["current_A"].as_f64() == Some(0.0)).collect();
    assert!(!zero.is_empty());
    for r in zero {
        assert_eq!(r["delta_y_m"].as_f64(), Some(0.0));
        assert_eq!(r["ab_phase_rad"].as_f64(), Some(0.0));
        assert_eq!(r["relative_deviation"].as_f64(), Some(0.0));
    }
}

#[test]
fn binary_rejects_unknown_config_key() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    std::fs::write(&path, "seed = 1\nflux_fudge = 2.0\n").unwrap();
    let out = tmp.path().join("out");
    let o = abtof(&["predict-delay", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn binary_seed_override_is_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = abtof(&["simulate", "--seed", "18446744073709551615", "--mode", "force_absent", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict"));
    let echoed = RunConfig::load(&out.join("config.toml")).unwrap();
    assert_eq!(echoed.seed, u64::MAX);
    assert_eq!(echoed.mode, ForceMode::ForceAbsent);
    assert!(echoed.out_dir.is_none());
}
