//! One command per reproducible claim: the force identity, the
//! force-hypothesis delay line, the time-of-flight simulation and the phase
//! comparison. Every command echoes its effective configuration into the
//! output directory as `config.toml`.

use nalgebra::Vector3;
use serde::Serialize;
use std::fs;
use std::path::Path;

use crate::analysis::{fit_ballistic, fit_delay_vs_current, DelayCurve, FitReport, Verdict};
use crate::error::Result;
use crate::experiment::{force_delay, sweep_current, sweep_energy, Histogram, TofSpectrum};
use crate::force::{boyer_force_y, loop_force_quadrature, LoopStack};
use crate::kinematics::{ab_phase, phase_equivalence_report, time_delay_eq4};
use crate::model::{electron_speed_from_energy, flux, PhysicalConstants, Side, TrajectorySpec};
use crate::output::{csv_bytes, fmt17, json_bytes, sig17, sig17_vec, write_atomic};
use crate::config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERDICT: i32 = 3;

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: Vec<String>,
}

fn prepare(cfg: &RunConfig, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    let echo = RunConfig { out_dir: None, ..cfg.clone() };
    write_atomic(&out.join("config.toml"), echo.to_toml()?.as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceRow {
    pub stack_length_over_radius: f64,
    pub d_over_radius: f64,
    pub rel_error: f64,
}

/// Quadrature over loop stacks against the closed form, for each stack
/// length and impact parameter (electron at `x_e = y_e = d`). Fails with
/// exit code 2 if any row exceeds `max_rel_error` or if the error does not
/// shrink as the stack lengthens.
pub fn cmd_verify_force(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let fc = &cfg.force_check;
    let spec = cfg.solenoid_spec();
    spec.validate()?;
    let c = PhysicalConstants::codata2018();
    let speed = electron_speed_from_energy(cfg.apparatus.kinetic_energy_ev, &c)?;
    let a = spec.bore_radius;

    let mut lengths = fc.stack_length_over_radius.clone();
    lengths.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &d in &fc.impact_over_radius {
        for &l in &lengths {
            let stack = LoopStack::with_length(a, l * a, spec.winding_density, fc.current_a)?;
            let electron = Vector3::new(d * a, d * a, 0.0);
            let quad = loop_force_quadrature(&stack, &electron, speed, &c, fc.quadrature_tolerance)?;
            let closed = boyer_force_y(stack.equivalent_flux(&c), (electron.x, electron.y), speed, &c)?;
            rows.push(ForceRow {
                stack_length_over_radius: l,
                d_over_radius: d,
                rel_error: (quad.force.y / closed - 1.0).abs(),
            });
        }
    }

    prepare(cfg, out)?;
    let bytes = csv_bytes(
        &["stack_length_over_radius", "d_over_radius", "rel_error"],
        rows.iter().map(|r| vec![fmt17(r.stack_length_over_radius), fmt17(r.d_over_radius), fmt17(r.rel_error)]),
    )?;
    write_atomic(&out.join("force_convergence.csv"), &bytes)?;

    let max_err = rows.iter().fold(0.0, |m: f64, r| m.max(r.rel_error));
    let monotone = rows
        .chunks(lengths.len().max(1))
        .all(|per_d| per_d.windows(2).all(|w| w[1].rel_error < w[0].rel_error));
    let pass = max_err < fc.max_rel_error && monotone;
    Ok(Outcome {
        exit_code: if pass { EXIT_OK } else { EXIT_NUMERICAL },
        summary: vec![
            format!("max rel_error {max_err:.3e} (limit {:.3e})", fc.max_rel_error),
            format!("monotone in stack length: {monotone}"),
            format!("force identity: {}", if pass { "PASS" } else { "FAIL" }),
        ],
    })
}

/// Force-hypothesis delay and the flux phase over the configured currents.
pub fn cmd_predict_delay(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let c = PhysicalConstants::codata2018();
    let spec = cfg.solenoid_spec();
    let speed = electron_speed_from_energy(cfg.apparatus.kinetic_energy_ev, &c)?;
    let mut rows = Vec::with_capacity(cfg.sweep.currents_a.len());
    for &i in &cfg.sweep.currents_a {
        let phi = flux(&spec.with_current(i), &c)?.flux;
        let delay = time_delay_eq4(phi, speed, &c)?;
        rows.push(vec![fmt17(i), fmt17(phi), fmt17(delay), fmt17(ab_phase(phi, &c))]);
    }
    prepare(cfg, out)?;
    let n = rows.len();
    write_atomic(
        &out.join("predict_delay.csv"),
        &csv_bytes(&["current_A", "flux_Wb", "delay_s", "ab_phase_rad"], rows)?,
    )?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        summary: vec![format!("{n} rows at {} eV", cfg.apparatus.kinetic_energy_ev)],
    })
}

#[derive(Serialize)]
struct HistogramRecord<'a> {
    #[serde(serialize_with = "sig17")]
    setting_current_a: f64,
    #[serde(serialize_with = "sig17")]
    setting_energy_ev: f64,
    #[serde(serialize_with = "sig17_vec")]
    bin_edges_s: &'a [f64],
    counts: &'a [u64],
}

fn histograms_json(spectra: &[TofSpectrum]) -> Result<Vec<u8>> {
    let records: Vec<HistogramRecord> = spectra
        .iter()
        .map(|s| {
            let Histogram { bin_edges_s, counts } = &s.histogram;
            HistogramRecord {
                setting_current_a: s.current,
                setting_energy_ev: s.energy_ev,
                bin_edges_s,
                counts,
            }
        })
        .collect();
    json_bytes(&records)
}

/// Shot-level CSV: `setting_current_A, setting_energy_eV, shot_index, arrival_time_s`.
pub fn spectra_csv(spectra: &[TofSpectrum]) -> Result<Vec<u8>> {
    csv_bytes(
        &["setting_current_A", "setting_energy_eV", "shot_index", "arrival_time_s"],
        spectra.iter().flat_map(|s| {
            s.arrival_times
                .iter()
                .enumerate()
                .map(move |(k, &t)| vec![fmt17(s.current), fmt17(s.energy_ev), k.to_string(), fmt17(t)])
        }),
    )
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub current_spectra: Vec<TofSpectrum>,
    pub curve: DelayCurve,
    pub report: FitReport,
    pub eq4_slope: f64,
}

/// Current sweep, delay extraction and the straight-line verdict; no I/O.
pub fn run_current_sweep(cfg: &RunConfig) -> Result<SimulationResult> {
    let apparatus = cfg.apparatus_config();
    let current_spectra = sweep_current(&apparatus, &cfg.sweep.currents_a)?;
    let curve = DelayCurve::from_spectra(&current_spectra)?;
    let eq4_slope = force_delay(&apparatus, 1.0, apparatus.kinetic_energy_ev)?;
    let report = fit_delay_vs_current(&curve, eq4_slope)?;
    Ok(SimulationResult { current_spectra, curve, report, eq4_slope })
}

pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let sim = run_current_sweep(cfg)?;
    let apparatus = cfg.apparatus_config();
    let c = apparatus.constants;

    let energy_part = if cfg.sweep.energies_ev.is_empty() {
        None
    } else {
        let spectra = sweep_energy(&apparatus, &cfg.sweep.energies_ev)?;
        let means: Vec<f64> = spectra.iter().map(TofSpectrum::mean).collect();
        let errors: Vec<f64> = spectra.iter().map(TofSpectrum::standard_error).collect();
        let fit = fit_ballistic(&cfg.sweep.energies_ev, &means, &errors, &c)?;
        Some((spectra, fit))
    };

    prepare(cfg, out)?;
    write_atomic(&out.join("spectra.csv"), &spectra_csv(&sim.current_spectra)?)?;
    write_atomic(&out.join("histograms.json"), &histograms_json(&sim.current_spectra)?)?;
    let curve_rows = (0..sim.curve.currents.len()).map(|i| {
        vec![
            fmt17(sim.curve.currents[i]),
            fmt17(sim.curve.measured_delays[i]),
            fmt17(sim.curve.delay_errors[i]),
            fmt17(sim.eq4_slope * sim.curve.currents[i]),
        ]
    });
    write_atomic(
        &out.join("delay_curve.csv"),
        &csv_bytes(&["current_A", "delay_s", "delay_error_s", "eq4_delay_s"], curve_rows)?,
    )?;
    write_atomic(&out.join("fit.json"), &json_bytes(&sim.report)?)?;

    let mut summary = vec![
        format!(
            "slope {:.4e} +- {:.2e} s/A (force hypothesis {:.4e} s/A)",
            sim.report.slope, sim.report.slope_stderr, sim.eq4_slope
        ),
        format!("z vs zero {:.2}, z vs force {:.2}", sim.report.z_against_zero, sim.report.z_against_eq4),
    ];
    if let Some((spectra, fit)) = energy_part {
        write_atomic(&out.join("spectra_energy.csv"), &spectra_csv(&spectra)?)?;
        write_atomic(&out.join("histograms_energy.json"), &histograms_json(&spectra)?)?;
        write_atomic(&out.join("ballistic_fit.json"), &json_bytes(&fit)?)?;
        summary.push(format!(
            "ballistic exponent {:.5} +- {:.1e}, flight length {:.5} m",
            fit.exponent, fit.exponent_stderr, fit.length_estimate
        ));
    }
    summary.push(format!("verdict: {}", sim.report.verdict.as_str()));
    Ok(Outcome {
        exit_code: if sim.report.verdict == Verdict::ExcludesBoth { EXIT_VERDICT } else { EXIT_OK },
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRow {
    #[serde(rename = "kinetic_energy_eV", serialize_with = "sig17")]
    pub kinetic_energy_ev: f64,
    #[serde(rename = "current_A", serialize_with = "sig17")]
    pub current_a: f64,
    #[serde(serialize_with = "sig17")]
    pub impact_parameter_m: f64,
    #[serde(rename = "flux_Wb", serialize_with = "sig17")]
    pub flux_wb: f64,
    #[serde(serialize_with = "sig17")]
    pub delta_y_m: f64,
    #[serde(serialize_with = "sig17")]
    pub time_delay_s: f64,
    #[serde(serialize_with = "sig17")]
    pub ab_phase_rad: f64,
    #[serde(serialize_with = "sig17")]
    pub semiclassical_phase_rad: f64,
    #[serde(serialize_with = "sig17")]
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCheckReport {
    pub rows: Vec<PhaseRow>,
    #[serde(serialize_with = "sig17")]
    pub max_relative_deviation: f64,
    /// Largest spread of the deviation across energies at fixed current and impact parameter.
    #[serde(serialize_with = "sig17")]
    pub max_energy_spread: f64,
}

/// Phase comparison over the configured grid; no I/O.
pub fn run_phase_check(cfg: &RunConfig) -> Result<PhaseCheckReport> {
    let c = PhysicalConstants::codata2018();
    let spec = cfg.solenoid_spec();
    let pc = &cfg.phase_check;
    let mut rows = Vec::new();
    for &e in &pc.energies_ev {
        let v = electron_speed_from_energy(e, &c)?;
        for &i in &pc.currents_a {
            let phi = flux(&spec.with_current(i), &c)?.flux;
            for &d in &pc.impact_parameters_m {
                let plus = TrajectorySpec::new(v, d, Side::Plus)?;
                plus.validate_against(&spec)?;
                let report = phase_equivalence_report(&plus, &plus.mirrored(), phi, &c)?;
                rows.push(PhaseRow {
                    kinetic_energy_ev: e,
                    current_a: i,
                    impact_parameter_m: d,
                    flux_wb: phi,
                    delta_y_m: report.prediction.delta_y_total,
                    time_delay_s: report.prediction.time_delay,
                    ab_phase_rad: report.phases.ab_phase,
                    semiclassical_phase_rad: report.phases.semiclassical_phase,
                    relative_deviation: report.relative_deviation,
                });
            }
        }
    }
    let max_relative_deviation = rows.iter().fold(0.0, |m: f64, r| m.max(r.relative_deviation));
    let mut max_energy_spread: f64 = 0.0;
    for &i in &pc.currents_a {
        for &d in &pc.impact_parameters_m {
            let devs = rows
                .iter()
                .filter(|r| r.current_a == i && r.impact_parameter_m == d)
                .map(|r| r.relative_deviation);
            let (lo, hi) = devs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            if hi >= lo {
                max_energy_spread = max_energy_spread.max(hi - lo);
            }
        }
    }
    Ok(PhaseCheckReport { rows, max_relative_deviation, max_energy_spread })
}

pub fn cmd_phase_check(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let report = run_phase_check(cfg)?;
    prepare(cfg, out)?;
    write_atomic(&out.join("phase_check.json"), &json_bytes(&report)?)?;
    let limit = cfg.phase_check.max_rel_deviation;
    let pass = report.max_relative_deviation <= limit && report.max_energy_spread < limit;
    Ok(Outcome {
        exit_code: if pass { EXIT_OK } else { EXIT_NUMERICAL },
        summary: vec![
            format!(
                "{} grid points, max relative deviation {:.3e} (limit {limit:.1e})",
                report.rows.len(),
                report.max_relative_deviation
            ),
            format!("max spread across energies {:.3e}", report.max_energy_spread),
            format!("phase equivalence: {}", if pass { "PASS" } else { "FAIL" }),
        ],
    })
}

/// Maps a command result onto the process exit code contract.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) => o.exit_code,
        Err(e) => e.exit_code(),
    }
}
