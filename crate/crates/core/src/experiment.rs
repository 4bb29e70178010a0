//! Time-of-flight apparatus simulation: an electron pulse crosses the gap
//! between the solenoids and reaches a detector with Gaussian timing jitter.
//! In force-present mode each arrival is retarded by the force-hypothesis
//! delay for the current setting.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::kinematics::time_delay_eq4;
use crate::model::{electron_speed_from_energy, flux, PhysicalConstants, SolenoidSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceMode {
    ForcePresent,
    ForceAbsent,
}

impl std::str::FromStr for ForceMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "force_present" => Ok(ForceMode::ForcePresent),
            "force_absent" => Ok(ForceMode::ForceAbsent),
            other => Err(format!("unknown force mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusConfig {
    pub flight_path_length: f64,
    /// One of the identical pair. Its `current` is the fixed setting used by
    /// energy sweeps.
    pub solenoid: SolenoidSpec,
    pub kinetic_energy_ev: f64,
    /// Standard deviation of the arrival-time jitter, seconds.
    pub jitter_sigma: f64,
    pub shots_per_setting: usize,
    pub force_mode: ForceMode,
    pub rng_seed: u64,
    /// Multiplies the force-hypothesis delay; 1 counts a single solenoid.
    pub delay_multiplier: f64,
    pub constants: PhysicalConstants,
}

impl Default for ApparatusConfig {
    fn default() -> Self {
        Self {
            flight_path_length: 0.3,
            solenoid: SolenoidSpec::bench(0.0),
            kinetic_energy_ev: 40.0,
            jitter_sigma: 1e-10,
            shots_per_setting: 100,
            force_mode: ForceMode::ForceAbsent,
            rng_seed: 0,
            delay_multiplier: 1.0,
            constants: PhysicalConstants::codata2018(),
        }
    }
}

impl ApparatusConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.flight_path_length > 0.0 && self.flight_path_length.is_finite(), || {
            format!("flight path length must be positive, got {}", self.flight_path_length)
        })?;
        ensure(self.jitter_sigma >= 0.0 && self.jitter_sigma.is_finite(), || {
            format!("jitter sigma must be non-negative, got {}", self.jitter_sigma)
        })?;
        ensure(self.shots_per_setting >= 1, || "need at least one shot per setting".into())?;
        ensure(self.delay_multiplier >= 0.0 && self.delay_multiplier.is_finite(), || {
            "delay multiplier must be non-negative".into()
        })?;
        self.solenoid.validate()?;
        electron_speed_from_energy(self.kinetic_energy_ev, &self.constants)?;
        Ok(())
    }
}

/// Free-flight time over the flight path; independent of the current.
pub fn ballistic_arrival_time(config: &ApparatusConfig) -> Result<f64> {
    config.validate()?;
    ballistic_time_at(config, config.kinetic_energy_ev)
}

fn ballistic_time_at(config: &ApparatusConfig, energy_ev: f64) -> Result<f64> {
    Ok(config.flight_path_length / electron_speed_from_energy(energy_ev, &config.constants)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_edges_s: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Fixed-width bins starting at the earliest sample.
    pub fn from_samples(samples: &[f64], bin_width: f64) -> Self {
        if samples.is_empty() {
            return Self { bin_edges_s: vec![], counts: vec![] };
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let n_bins = (((hi - lo) / bin_width).floor() as usize) + 1;
        let mut counts = vec![0u64; n_bins];
        for &s in samples {
            let i = (((s - lo) / bin_width).floor() as usize).min(n_bins - 1);
            counts[i] += 1;
        }
        let bin_edges_s = (0..=n_bins).map(|i| lo + bin_width * i as f64).collect();
        Self { bin_edges_s, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Bin width used when the jitter is zero.
pub const JITTERLESS_BIN_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TofSpectrum {
    pub current: f64,
    pub energy_ev: f64,
    pub arrival_times: Vec<f64>,
    pub histogram: Histogram,
}

impl TofSpectrum {
    pub fn shots(&self) -> usize {
        self.arrival_times.len()
    }

    fn moments(&self) -> (f64, f64) {
        // Welford; exact for repeated identical samples
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for (k, &t) in self.arrival_times.iter().enumerate() {
            let d = t - mean;
            mean += d / (k + 1) as f64;
            m2 += d * (t - mean);
        }
        (mean, m2)
    }

    pub fn mean(&self) -> f64 {
        self.moments().0
    }

    /// Unbiased sample variance; zero for a single shot.
    pub fn variance(&self) -> f64 {
        let n = self.arrival_times.len();
        if n < 2 {
            return 0.0;
        }
        self.moments().1 / (n - 1) as f64
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance() / self.shots() as f64).sqrt()
    }
}

const CURRENT_STREAM: u64 = 1;
const ENERGY_STREAM: u64 = 2;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for setting `index` of sweep `stream`, independent of evaluation order.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ splitmix64(index)))
}

/// Force-hypothesis delay added in force-present mode at this setting.
pub fn force_delay(config: &ApparatusConfig, current: f64, energy_ev: f64) -> Result<f64> {
    let phi = flux(&config.solenoid.with_current(current), &config.constants)?.flux;
    let v0 = electron_speed_from_energy(energy_ev, &config.constants)?;
    Ok(config.delay_multiplier * time_delay_eq4(phi, v0, &config.constants)?)
}

fn simulate_setting(config: &ApparatusConfig, current: f64, energy_ev: f64, seed: u64) -> Result<TofSpectrum> {
    ensure(current.is_finite(), || "current must be finite".into())?;
    let base = ballistic_time_at(config, energy_ev)?;
    let shift = match config.force_mode {
        ForceMode::ForcePresent => force_delay(config, current, energy_ev)?,
        ForceMode::ForceAbsent => 0.0,
    };
    let centre = base + shift;
    let arrival_times: Vec<f64> = if config.jitter_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let jitter = Normal::new(0.0, config.jitter_sigma).expect("sigma validated non-negative");
        (0..config.shots_per_setting).map(|_| centre + jitter.sample(&mut rng)).collect()
    } else {
        vec![centre; config.shots_per_setting]
    };
    ensure(arrival_times.iter().all(|&t| t > 0.0), || {
        "jitter produced a non-positive arrival time; reduce jitter_sigma".into()
    })?;
    let width = if config.jitter_sigma > 0.0 { 0.5 * config.jitter_sigma } else { JITTERLESS_BIN_WIDTH };
    let histogram = Histogram::from_samples(&arrival_times, width);
    Ok(TofSpectrum { current, energy_ev, arrival_times, histogram })
}

/// One spectrum at the configured energy, seeded directly by `rng_seed`.
pub fn simulate_spectrum(config: &ApparatusConfig, current: f64) -> Result<TofSpectrum> {
    config.validate()?;
    simulate_setting(config, current, config.kinetic_energy_ev, config.rng_seed)
}

pub fn sweep_current(config: &ApparatusConfig, currents: &[f64]) -> Result<Vec<TofSpectrum>> {
    config.validate()?;
    for (i, a) in currents.iter().enumerate() {
        ensure(!currents[..i].contains(a), || format!("current {a} A appears twice in the sweep"))?;
    }
    currents
        .iter()
        .enumerate()
        .map(|(i, &current)| {
            let seed = derive_seed(config.rng_seed, CURRENT_STREAM, i as u64);
            simulate_setting(config, current, config.kinetic_energy_ev, seed)
        })
        .collect()
}

/// One spectrum per energy at the solenoid's configured current.
pub fn sweep_energy(config: &ApparatusConfig, energies_ev: &[f64]) -> Result<Vec<TofSpectrum>> {
    config.validate()?;
    for &e in energies_ev {
        ensure(e > 0.0 && e.is_finite(), || format!("energy must be positive, got {e} eV"))?;
    }
    energies_ev
        .iter()
        .enumerate()
        .map(|(i, &energy)| {
            let seed = derive_seed(config.rng_seed, ENERGY_STREAM, i as u64);
            simulate_setting(config, config.solenoid.current, energy, seed)
        })
        .collect()
}

/// Induced EMF of a pick-up coil linking the solenoid flux. The EMF is
/// constant on each interval of the piecewise-linear current waveform, so
/// `emf[i]` holds on `[times[i], times[i + 1])` and `emf` is one shorter
/// than `times`.
#[derive(Debug, Clone, PartialEq)]
pub struct PickupTrace {
    pub times: Vec<f64>,
    pub emf: Vec<f64>,
}

impl PickupTrace {
    /// `int emf dt` over `[t0, t1]`, clipped to the trace.
    pub fn integrate(&self, t0: f64, t1: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &e) in self.emf.iter().enumerate() {
            let lo = self.times[i].max(t0);
            let hi = self.times[i + 1].min(t1);
            if hi > lo {
                acc += e * (hi - lo);
            }
        }
        acc
    }
}

pub fn pickup_emf(
    current_waveform: &[(f64, f64)],
    spec: &SolenoidSpec,
    pickup_turns: u32,
    constants: &PhysicalConstants,
) -> Result<PickupTrace> {
    ensure(current_waveform.len() >= 2, || "waveform needs at least two samples".into())?;
    ensure(current_waveform.windows(2).all(|w| w[1].0 > w[0].0), || {
        "waveform times must be strictly increasing".into()
    })?;
    let fluxes = current_waveform
        .iter()
        .map(|&(_, i)| Ok(flux(&spec.with_current(i), constants)?.flux))
        .collect::<Result<Vec<f64>>>()?;
    let turns = pickup_turns as f64;
    let emf = current_waveform
        .windows(2)
        .zip(fluxes.windows(2))
        .map(|(w, f)| turns * (f[0] - f[1]) / (w[1].0 - w[0].0))
        .collect();
    Ok(PickupTrace { times: current_waveform.iter().map(|&(t, _)| t).collect(), emf })
}
