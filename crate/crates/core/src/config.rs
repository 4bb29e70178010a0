//! Run configuration, read from TOML. Unknown keys are rejected; keys that
//! carry units end in their unit (`_m`, `_s`, `_A`, `_eV`).

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{ApparatusConfig, ForceMode};
use crate::model::{PhysicalConstants, SolenoidSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: ForceMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub solenoid: SolenoidSection,
    #[serde(default)]
    pub apparatus: ApparatusSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub force_check: ForceCheckSection,
    #[serde(default)]
    pub phase_check: PhaseCheckSection,
}

fn default_mode() -> ForceMode {
    ForceMode::ForceAbsent
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolenoidSection {
    pub bore_radius_m: f64,
    pub winding_density_per_m: f64,
    pub core_permeability: f64,
    pub length_m: f64,
    /// Fixed current for energy sweeps.
    #[serde(rename = "current_A")]
    pub current_a: f64,
}

impl Default for SolenoidSection {
    fn default() -> Self {
        let s = SolenoidSpec::bench(0.0);
        Self {
            bore_radius_m: s.bore_radius,
            winding_density_per_m: s.winding_density,
            core_permeability: s.core_permeability,
            length_m: s.length,
            current_a: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApparatusSection {
    pub flight_path_length_m: f64,
    #[serde(rename = "kinetic_energy_eV")]
    pub kinetic_energy_ev: f64,
    pub jitter_sigma_s: f64,
    pub shots_per_setting: usize,
    pub delay_multiplier: f64,
}

impl Default for ApparatusSection {
    fn default() -> Self {
        let a = ApparatusConfig::default();
        Self {
            flight_path_length_m: a.flight_path_length,
            kinetic_energy_ev: a.kinetic_energy_ev,
            jitter_sigma_s: a.jitter_sigma,
            shots_per_setting: a.shots_per_setting,
            delay_multiplier: a.delay_multiplier,
        }
    }
}

/// `n` evenly spaced currents from 0 to `max`.
pub fn current_grid(max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    #[serde(rename = "currents_A")]
    pub currents_a: Vec<f64>,
    #[serde(rename = "energies_eV")]
    pub energies_ev: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            currents_a: current_grid(10e-3, 10),
            energies_ev: vec![20.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForceCheckSection {
    pub stack_length_over_radius: Vec<f64>,
    pub impact_over_radius: Vec<f64>,
    #[serde(rename = "current_A")]
    pub current_a: f64,
    pub quadrature_tolerance: f64,
    pub max_rel_error: f64,
}

impl Default for ForceCheckSection {
    fn default() -> Self {
        Self {
            stack_length_over_radius: vec![100.0, 200.0, 400.0],
            impact_over_radius: vec![10.0],
            current_a: 1e-3,
            quadrature_tolerance: 1e-9,
            max_rel_error: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseCheckSection {
    #[serde(rename = "energies_eV")]
    pub energies_ev: Vec<f64>,
    #[serde(rename = "currents_A")]
    pub currents_a: Vec<f64>,
    pub impact_parameters_m: Vec<f64>,
    pub max_rel_deviation: f64,
}

impl Default for PhaseCheckSection {
    fn default() -> Self {
        Self {
            energies_ev: vec![20.0, 40.0, 80.0],
            currents_a: vec![0.0, 1e-3, 5e-3, 10e-3],
            impact_parameters_m: vec![5e-3, 5e-2],
            max_rel_deviation: 1e-3,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            mode: default_mode(),
            out_dir: None,
            solenoid: SolenoidSection::default(),
            apparatus: ApparatusSection::default(),
            sweep: SweepSection::default(),
            force_check: ForceCheckSection::default(),
            phase_check: PhaseCheckSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn solenoid_spec(&self) -> SolenoidSpec {
        let s = &self.solenoid;
        SolenoidSpec {
            bore_radius: s.bore_radius_m,
            winding_density: s.winding_density_per_m,
            current: s.current_a,
            core_permeability: s.core_permeability,
            length: s.length_m,
            ..SolenoidSpec::bench(0.0)
        }
    }

    pub fn apparatus_config(&self) -> ApparatusConfig {
        let a = &self.apparatus;
        ApparatusConfig {
            flight_path_length: a.flight_path_length_m,
            solenoid: self.solenoid_spec(),
            kinetic_energy_ev: a.kinetic_energy_ev,
            jitter_sigma: a.jitter_sigma_s,
            shots_per_setting: a.shots_per_setting,
            force_mode: self.mode,
            rng_seed: self.seed,
            delay_multiplier: a.delay_multiplier,
            constants: PhysicalConstants::codata2018(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::from_toml("[apparatus]\njitter_sigma = 1e-10").is_err());
        assert!(RunConfig::from_toml("[sweep]\ncurrents = [0.0]").is_err());
    }

    #[test]
    fn partial_sections_keep_defaults() {
        let cfg = RunConfig::from_toml(
            "seed = 9\nmode = \"force_present\"\n[apparatus]\nkinetic_energy_eV = 80.0\n[sweep]\ncurrents_A = [0.0, 0.002]\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.mode, ForceMode::ForcePresent);
        assert_eq!(cfg.apparatus.kinetic_energy_ev, 80.0);
        assert_eq!(cfg.apparatus.jitter_sigma_s, 1e-10);
        assert_eq!(cfg.sweep.currents_a, vec![0.0, 0.002]);
        assert_eq!(cfg.apparatus_config().rng_seed, 9);
    }

    #[test]
    fn toml_echo_round_trips() {
        let mut cfg = RunConfig { seed: u64::MAX, ..RunConfig::default() };
        cfg.apparatus.jitter_sigma_s = 0.1e-9 / 3.0;
        let back = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn default_current_grid() {
        let g = current_grid(10e-3, 10);
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[9], 10e-3);
    }
}
