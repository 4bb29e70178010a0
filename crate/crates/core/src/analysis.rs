//! Delay extraction, weighted straight-line fits and the zero-force versus
//! force-hypothesis verdict.

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::experiment::TofSpectrum;
use crate::model::PhysicalConstants;
use crate::output::sig17;

/// z-statistic beyond which a hypothesis is excluded.
pub const VERDICT_THRESHOLD: f64 = 3.0;

/// Delay of `spectrum` relative to `reference` from the centroids, with
/// the combined standard error `sqrt(s1^2/n1 + s2^2/n2)`.
pub fn extract_delay(spectrum: &TofSpectrum, reference: &TofSpectrum) -> Result<(f64, f64)> {
    ensure(spectrum.shots() > 0 && reference.shots() > 0, || "cannot extract a delay from an empty spectrum".into())?;
    ensure(spectrum.energy_ev == reference.energy_ev, || {
        format!("spectra taken at different energies: {} vs {} eV", spectrum.energy_ev, reference.energy_ev)
    })?;
    let delay = spectrum.mean() - reference.mean();
    let error = (spectrum.variance() / spectrum.shots() as f64 + reference.variance() / reference.shots() as f64).sqrt();
    Ok((delay, error))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayCurve {
    pub currents: Vec<f64>,
    pub measured_delays: Vec<f64>,
    pub delay_errors: Vec<f64>,
}

impl DelayCurve {
    /// Delays of each spectrum relative to the lowest-current one.
    pub fn from_spectra(spectra: &[TofSpectrum]) -> Result<Self> {
        ensure(!spectra.is_empty(), || "no spectra".into())?;
        let reference = spectra
            .iter()
            .min_by(|a, b| a.current.total_cmp(&b.current))
            .expect("non-empty");
        let mut curve = DelayCurve { currents: vec![], measured_delays: vec![], delay_errors: vec![] };
        for s in spectra {
            let (d, e) = extract_delay(s, reference)?;
            curve.currents.push(s.current);
            curve.measured_delays.push(d);
            curve.delay_errors.push(e);
        }
        Ok(curve)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub chi2: f64,
}

/// Weighted least squares `y = intercept + slope x` with known errors.
pub fn weighted_line_fit(x: &[f64], y: &[f64], sigma: &[f64]) -> Result<LineFit> {
    ensure(x.len() == y.len() && x.len() == sigma.len(), || "fit columns differ in length".into())?;
    ensure(x.len() >= 2, || "need at least two points".into())?;
    ensure(sigma.iter().all(|&s| s > 0.0 && s.is_finite()), || "errors must be positive".into())?;

    let w: Vec<f64> = sigma.iter().map(|s| 1.0 / (s * s)).collect();
    let s: f64 = w.iter().sum();
    let x_bar = x.iter().zip(&w).map(|(x, w)| w * x).sum::<f64>() / s;
    let y_bar = y.iter().zip(&w).map(|(y, w)| w * y).sum::<f64>() / s;
    let mut stt = 0.0;
    let mut sty = 0.0;
    for i in 0..x.len() {
        let t = x[i] - x_bar;
        stt += w[i] * t * t;
        sty += w[i] * t * (y[i] - y_bar);
    }
    ensure(stt > 0.0, || "degenerate design: all abscissae equal".into())?;
    let slope = sty / stt;
    let intercept = y_bar - slope * x_bar;
    let chi2 = (0..x.len()).map(|i| w[i] * (y[i] - intercept - slope * x[i]).powi(2)).sum();
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr: (1.0 / stt).sqrt(),
        intercept_stderr: (1.0 / s + x_bar * x_bar / stt).sqrt(),
        chi2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConsistentZero,
    ConsistentEq4,
    Inconclusive,
    ExcludesBoth,
}

impl Verdict {
    pub fn from_z(z_against_zero: f64, z_against_eq4: f64, threshold: f64) -> Self {
        match (z_against_zero > threshold, z_against_eq4 > threshold) {
            (false, true) => Verdict::ConsistentZero,
            (true, false) => Verdict::ConsistentEq4,
            (false, false) => Verdict::Inconclusive,
            (true, true) => Verdict::ExcludesBoth,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ConsistentZero => "consistent_zero",
            Verdict::ConsistentEq4 => "consistent_eq4",
            Verdict::Inconclusive => "inconclusive",
            Verdict::ExcludesBoth => "excludes_both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    #[serde(serialize_with = "sig17")]
    pub slope: f64,
    #[serde(serialize_with = "sig17")]
    pub slope_stderr: f64,
    #[serde(serialize_with = "sig17")]
    pub intercept: f64,
    #[serde(serialize_with = "sig17")]
    pub z_against_zero: f64,
    #[serde(serialize_with = "sig17")]
    pub z_against_eq4: f64,
    pub verdict: Verdict,
}

pub fn fit_delay_vs_current(curve: &DelayCurve, eq4_slope: f64) -> Result<FitReport> {
    fit_delay_vs_current_with_threshold(curve, eq4_slope, VERDICT_THRESHOLD)
}

pub fn fit_delay_vs_current_with_threshold(curve: &DelayCurve, eq4_slope: f64, threshold: f64) -> Result<FitReport> {
    ensure(curve.currents.len() >= 3, || format!("need at least 3 currents, got {}", curve.currents.len()))?;
    let fit = weighted_line_fit(&curve.currents, &curve.measured_delays, &curve.delay_errors)?;
    let z_against_zero = fit.slope.abs() / fit.slope_stderr;
    let z_against_eq4 = (fit.slope - eq4_slope).abs() / fit.slope_stderr;
    Ok(FitReport {
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept: fit.intercept,
        z_against_zero,
        z_against_eq4,
        verdict: Verdict::from_z(z_against_zero, z_against_eq4, threshold),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallisticFit {
    #[serde(serialize_with = "sig17")]
    pub exponent: f64,
    #[serde(serialize_with = "sig17")]
    pub length_estimate: f64,
    #[serde(serialize_with = "sig17")]
    pub exponent_stderr: f64,
}

/// Fits `ln t = ln C + p ln E` and reports `p` (free-flight: -1/2) and the
/// flight length implied by `C = L sqrt(m / 2 q)`.
pub fn fit_ballistic(
    energies_ev: &[f64],
    mean_arrivals: &[f64],
    errors: &[f64],
    constants: &PhysicalConstants,
) -> Result<BallisticFit> {
    ensure(energies_ev.len() == mean_arrivals.len() && energies_ev.len() == errors.len(), || {
        "fit columns differ in length".into()
    })?;
    ensure(energies_ev.len() >= 3, || format!("need at least 3 energies, got {}", energies_ev.len()))?;
    ensure(
        energies_ev.iter().chain(mean_arrivals).chain(errors).all(|&v| v > 0.0 && v.is_finite()),
        || "energies, arrival times and errors must be positive".into(),
    )?;
    let lo = energies_ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = energies_ev.iter().copied().fold(0.0, f64::max);
    ensure(hi >= 2.0 * lo, || "energies must span at least a factor of 2".into())?;

    let x: Vec<f64> = energies_ev.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = mean_arrivals.iter().map(|t| t.ln()).collect();
    let s: Vec<f64> = errors.iter().zip(mean_arrivals).map(|(e, t)| e / t).collect();
    let fit = weighted_line_fit(&x, &y, &s)?;
    let scale = (constants.m() / (2.0 * constants.ev())).sqrt();
    Ok(BallisticFit {
        exponent: fit.slope,
        length_estimate: fit.intercept.exp() / scale,
        exponent_stderr: fit.slope_stderr,
    })
}
