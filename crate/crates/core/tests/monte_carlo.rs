//! Statistical checks of the simulated spectra and the delay estimator.

use abtof::analysis::extract_delay;
use abtof::commands::run_current_sweep;
use abtof::config::RunConfig;
use abtof::experiment::{force_delay, simulate_spectrum, ApparatusConfig, ForceMode};

fn cfg(seed: u64, mode: ForceMode) -> ApparatusConfig {
    ApparatusConfig { rng_seed: seed, force_mode: mode, ..ApparatusConfig::default() }
}

#[test]
fn extracted_delay_is_unbiased() {
    let current = 5e-3;
    let truth = force_delay(&cfg(0, ForceMode::ForcePresent), current, 40.0).unwrap();
    let n = 1000;
    let mut sum = 0.0;
    let mut err2 = 0.0;
    for seed in 0..n {
        let c = cfg(seed, ForceMode::ForcePresent);
        let reference = simulate_spectrum(&c, 0.0).unwrap();
        let shifted = simulate_spectrum(&ApparatusConfig { rng_seed: seed + 1_000_000, ..c }, current).unwrap();
        let (d, e) = extract_delay(&shifted, &reference).unwrap();
        sum += d;
        err2 += e * e;
    }
    let mean = sum / n as f64;
    let se_of_mean = (err2 / n as f64).sqrt() / (n as f64).sqrt();
    assert!((mean - truth).abs() <= 4.0 * se_of_mean, "mean {mean:e} truth {truth:e} se {se_of_mean:e}");
}

#[test]
fn force_absent_spectra_match_across_currents() {
    let seeds = 100;
    let mut within = 0;
    for seed in 0..seeds {
        let c = cfg(seed, ForceMode::ForceAbsent);
        let a = simulate_spectrum(&c, 0.0).unwrap();
        let b = simulate_spectrum(&ApparatusConfig { rng_seed: seed ^ 0xABCD_EF01, ..c }, 10e-3).unwrap();
        let bound = 4.0 * c.jitter_sigma / (c.shots_per_setting as f64).sqrt();
        if (a.mean() - b.mean()).abs() < bound {
            within += 1;
        }
    }
    assert!(within >= 99, "{within}/{seeds}");
}

#[test]
fn force_present_shift_matches_hypothesis() {
    let mut within = 0;
    let seeds = 200;
    for seed in 0..seeds {
        let c = cfg(seed, ForceMode::ForcePresent);
        let truth = force_delay(&c, 10e-3, 40.0).unwrap();
        let a = simulate_spectrum(&c, 0.0).unwrap();
        let b = simulate_spectrum(&ApparatusConfig { rng_seed: seed + 77, ..c }, 10e-3).unwrap();
        let (d, e) = extract_delay(&b, &a).unwrap();
        if (d - truth).abs() <= 3.0 * e {
            within += 1;
        }
    }
    // 3-sigma coverage is 99.7%; allow sampling slack
    assert!(within as f64 >= 0.98 * seeds as f64, "{within}/{seeds}");
}

#[test]
fn slope_stderr_is_conservative() {
    let seeds = 500;
    let mut covered = 0;
    for seed in 0..seeds {
        let cfg = RunConfig { seed, mode: ForceMode::ForcePresent, ..RunConfig::default() };
        let sim = run_current_sweep(&cfg).unwrap();
        if (sim.report.slope - sim.eq4_slope).abs() <= 2.0 * sim.report.slope_stderr {
            covered += 1;
        }
    }
    assert!(covered as f64 >= 0.95 * seeds as f64, "{covered}/{seeds}");
}
