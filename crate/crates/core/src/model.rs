//! Physical constants, the iron-core solenoid flux model and the shared
//! trajectory description.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{ensure, Result};

/// CODATA-2018 constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    electron_charge_magnitude: f64,
    electron_mass: f64,
    vacuum_permeability: f64,
    reduced_planck: f64,
    vacuum_permittivity: f64,
}

impl PhysicalConstants {
    pub const fn codata2018() -> Self {
        Self {
            electron_charge_magnitude: 1.602_176_634e-19,
            electron_mass: 9.109_383_701_5e-31,
            vacuum_permeability: 1.256_637_062_12e-6,
            reduced_planck: 1.054_571_817e-34,
            vacuum_permittivity: 8.854_187_812_8e-12,
        }
    }

    /// Elementary charge, C.
    pub fn q(&self) -> f64 {
        self.electron_charge_magnitude
    }

    /// Electron mass, kg.
    pub fn m(&self) -> f64 {
        self.electron_mass
    }

    /// Vacuum permeability, H/m.
    pub fn mu0(&self) -> f64 {
        self.vacuum_permeability
    }

    /// Reduced Planck constant, J s.
    pub fn hbar(&self) -> f64 {
        self.reduced_planck
    }

    /// Vacuum permittivity, F/m.
    pub fn eps0(&self) -> f64 {
        self.vacuum_permittivity
    }

    /// Joules per electronvolt.
    pub fn ev(&self) -> f64 {
        self.electron_charge_magnitude
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// A straight solenoid with a linear soft-iron core.
///
/// `core_permeability` multiplies the air-core field; the same factor
/// scales the force the passing electron exerts on the solenoid-core system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolenoidSpec {
    pub bore_radius: f64,
    /// Turns per meter.
    pub winding_density: f64,
    /// Signed, amperes.
    pub current: f64,
    pub core_permeability: f64,
    pub length: f64,
    pub center_position: Vector3<f64>,
    pub axis: Vector3<f64>,
}

impl SolenoidSpec {
    /// 2.5 mm bore, 3 turns/mm, relative permeability 150, 0.25 m long, on the z axis.
    pub fn bench(current: f64) -> Self {
        Self {
            bore_radius: 1.25e-3,
            winding_density: 3000.0,
            current,
            core_permeability: 150.0,
            length: 0.25,
            center_position: Vector3::zeros(),
            axis: Vector3::z(),
        }
    }

    pub fn with_current(mut self, current: f64) -> Self {
        self.current = current;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.bore_radius > 0.0 && self.bore_radius.is_finite(), || {
            format!("bore radius must be positive, got {}", self.bore_radius)
        })?;
        ensure(self.winding_density > 0.0 && self.winding_density.is_finite(), || {
            format!("winding density must be positive, got {}", self.winding_density)
        })?;
        ensure(self.core_permeability >= 1.0 && self.core_permeability.is_finite(), || {
            format!("core permeability must be >= 1, got {}", self.core_permeability)
        })?;
        ensure(self.length > 0.0 && self.length.is_finite(), || {
            format!("solenoid length must be positive, got {}", self.length)
        })?;
        ensure(self.current.is_finite(), || "current must be finite".into())?;
        ensure((self.axis.norm() - 1.0).abs() <= 1e-12, || {
            format!("axis must be a unit vector, |axis| = {}", self.axis.norm())
        })?;
        Ok(())
    }

    pub fn bore_area(&self) -> f64 {
        PI * self.bore_radius * self.bore_radius
    }
}

/// Flux together with the factors that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxResult {
    /// Webers.
    pub flux: f64,
    pub components: FluxComponents,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxComponents {
    pub core_permeability: f64,
    pub vacuum_permeability: f64,
    pub current: f64,
    pub winding_density: f64,
    pub bore_area: f64,
}

/// Flux through the bore, `k mu0 I n A`.
pub fn flux(spec: &SolenoidSpec, constants: &PhysicalConstants) -> Result<FluxResult> {
    spec.validate()?;
    let components = FluxComponents {
        core_permeability: spec.core_permeability,
        vacuum_permeability: constants.mu0(),
        current: spec.current,
        winding_density: spec.winding_density,
        bore_area: spec.bore_area(),
    };
    let flux = components.core_permeability
        * components.vacuum_permeability
        * components.current
        * components.winding_density
        * components.bore_area;
    Ok(FluxResult { flux, components })
}

/// Nonrelativistic speed of an electron with the given kinetic energy in eV.
pub fn electron_speed_from_energy(kinetic_energy_ev: f64, constants: &PhysicalConstants) -> Result<f64> {
    ensure(kinetic_energy_ev > 0.0 && kinetic_energy_ev.is_finite(), || {
        format!("kinetic energy must be positive, got {kinetic_energy_ev} eV")
    })?;
    Ok((2.0 * kinetic_energy_ev * constants.ev() / constants.m()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// A straight electron path `x = x_e`, `y = v0 t`, `z = 0` in the solenoid frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySpec {
    pub speed: f64,
    /// Distance of closest approach to the axis; only the magnitude is used.
    pub impact_parameter: f64,
    pub side: Side,
}

impl TrajectorySpec {
    pub fn new(speed: f64, impact_parameter: f64, side: Side) -> Result<Self> {
        let t = Self { speed, impact_parameter, side };
        t.validate()?;
        Ok(t)
    }

    /// The mirror path on the other side of the solenoid.
    pub fn mirrored(&self) -> Self {
        let side = match self.side {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        };
        Self { side, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.speed > 0.0 && self.speed.is_finite(), || {
            format!("speed must be positive, got {}", self.speed)
        })?;
        ensure(self.impact_parameter != 0.0 && self.impact_parameter.is_finite(), || {
            "impact parameter must be nonzero".into()
        })
    }

    /// Rejects paths that would enter the solenoid envelope.
    pub fn validate_against(&self, spec: &SolenoidSpec) -> Result<()> {
        self.validate()?;
        ensure(self.impact_parameter.abs() > spec.bore_radius, || {
            format!(
                "impact parameter {} m does not clear the bore radius {} m",
                self.impact_parameter.abs(),
                spec.bore_radius
            )
        })
    }

    /// Signed `x_e`.
    pub fn x(&self) -> f64 {
        self.side.sign() * self.impact_parameter.abs()
    }

    pub fn position_at(&self, t: f64) -> Vector3<f64> {
        Vector3::new(self.x(), self.speed * t, 0.0)
    }

    /// Time to cross one impact parameter, `|d| / v0`.
    pub fn time_scale(&self) -> f64 {
        self.impact_parameter.abs() / self.speed
    }
}
