//! Force exerted by a passing electron on a solenoid.
//!
//! Two routes: direct azimuthal quadrature of `I dl x B` over a finite stack
//! of circular current loops, and the closed form for an infinite line of
//! magnetic dipoles,
//!
//! `F_y = (Phi v0 q / 4 pi) * 4 x_e y_e / (x_e^2 + y_e^2)^2`.
//!
//! For a long stack the two agree up to the end-truncation of the stack,
//! which [`truncation_fraction`] gives in closed form.

use nalgebra::Vector3;
use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};
use crate::model::{PhysicalConstants, SolenoidSpec};
use crate::quadrature::{adaptive, AdaptiveOptions};

/// Minimum distance between the electron and any loop wire.
pub const WIRE_CLEARANCE: f64 = 1e-6;

pub const DEFAULT_LOOP_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_STACK_TOLERANCE: f64 = 1e-6;
/// Stack length, in loop radii, used when standing in for an infinite solenoid.
pub const DEFAULT_STACK_LENGTH_OVER_RADIUS: f64 = 200.0;

/// Coaxial circular loops on the z axis, centered on the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopStack {
    pub loop_radius: f64,
    pub loop_count: usize,
    pub axial_spacing: f64,
    pub loop_current: f64,
}

impl LoopStack {
    /// Loops at the winding pitch of `spec`, as many as fit in its length.
    pub fn from_solenoid(spec: &SolenoidSpec) -> Result<Self> {
        spec.validate()?;
        Self::with_length(spec.bore_radius, spec.length, spec.winding_density, spec.current)
    }

    pub fn with_length(loop_radius: f64, length: f64, winding_density: f64, loop_current: f64) -> Result<Self> {
        ensure(length > 0.0 && winding_density > 0.0, || {
            format!("stack needs positive length and winding density, got {length}, {winding_density}")
        })?;
        let stack = Self {
            loop_radius,
            loop_count: ((length * winding_density).round() as usize).max(1),
            axial_spacing: 1.0 / winding_density,
            loop_current,
        };
        stack.validate()?;
        Ok(stack)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.loop_radius > 0.0, || format!("loop radius must be positive, got {}", self.loop_radius))?;
        ensure(self.loop_count >= 1, || "stack needs at least one loop".into())?;
        ensure(self.axial_spacing > 0.0, || format!("loop spacing must be positive, got {}", self.axial_spacing))?;
        ensure(self.loop_current.is_finite(), || "loop current must be finite".into())
    }

    pub fn length(&self) -> f64 {
        self.loop_count as f64 * self.axial_spacing
    }

    pub fn loop_z(&self, index: usize) -> f64 {
        (index as f64 - 0.5 * (self.loop_count as f64 - 1.0)) * self.axial_spacing
    }

    /// Air-core flux of the equivalent continuous solenoid, `mu0 n I pi a^2`.
    pub fn equivalent_flux(&self, constants: &PhysicalConstants) -> f64 {
        constants.mu0() * self.loop_current / self.axial_spacing * PI * self.loop_radius * self.loop_radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceMethod {
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub electron_position: Vector3<f64>,
    pub force: Vector3<f64>,
    pub method: ForceMethod,
    /// Summed quadrature error bound; `None` for closed-form samples.
    pub error_estimate: Option<f64>,
}

/// Force on one loop at height `z0`, from the field of the passing charge.
fn single_loop_force(
    stack: &LoopStack,
    z0: f64,
    electron: &Vector3<f64>,
    prefactor: f64,
    opts: &AdaptiveOptions,
) -> Result<(Vector3<f64>, f64)> {
    let a = stack.loop_radius;
    let current = stack.loop_current;
    let est = adaptive(
        |phi: f64| {
            let (s, c) = phi.sin_cos();
            let r = Vector3::new(a * c, a * s, z0) - electron;
            let inv_r3 = 1.0 / r.norm().powi(3);
            let b = Vector3::new(prefactor * r.z * inv_r3, 0.0, -prefactor * r.x * inv_r3);
            let dl = Vector3::new(-a * s, a * c, 0.0);
            dl.cross(&b) * current
        },
        0.0,
        2.0 * PI,
        opts,
    )?;
    Ok((est.value, est.error))
}

/// Sums `I dl x B` over every loop of the stack, each loop integrated over
/// its azimuth to `tolerance` relative. The returned error estimate is at
/// most `tolerance * |F|`.
pub fn loop_force_quadrature(
    stack: &LoopStack,
    electron_position: &Vector3<f64>,
    speed: f64,
    constants: &PhysicalConstants,
    tolerance: f64,
) -> Result<ForceSample> {
    stack.validate()?;
    ensure(tolerance > 0.0, || format!("tolerance must be positive, got {tolerance}"))?;
    ensure(speed.is_finite(), || "speed must be finite".into())?;

    let e = electron_position;
    let rho_e = e.x.hypot(e.y);
    for k in 0..stack.loop_count {
        let gap = (rho_e - stack.loop_radius).hypot(e.z - stack.loop_z(k));
        if gap <= WIRE_CLEARANCE {
            return Err(Error::Singularity(format!(
                "electron {gap:e} m from the wire of loop {k}"
            )));
        }
    }

    let prefactor = speed * constants.q() * constants.mu0() / (4.0 * PI);
    let run = |rel_tol: f64| -> Result<(Vector3<f64>, f64, f64)> {
        let opts = AdaptiveOptions { rel_tol, ..AdaptiveOptions::default() };
        let mut total = Vector3::zeros();
        let mut error = 0.0;
        let mut gross = 0.0;
        for k in 0..stack.loop_count {
            let (f, err) = single_loop_force(stack, stack.loop_z(k), e, prefactor, &opts)?;
            total += f;
            error += err;
            gross += f.norm();
        }
        Ok((total, error, gross))
    };

    let (mut force, mut error, gross) = run(tolerance)?;
    if error > tolerance * force.norm() && force.norm() > 0.0 {
        // contributions cancel between loops; tighten per-loop tolerance
        let (f, err, _) = run(tolerance * force.norm() / gross)?;
        force = f;
        error = err;
    }

    Ok(ForceSample {
        electron_position: *e,
        force,
        method: ForceMethod::Quadrature,
        error_estimate: Some(error),
    })
}

/// Closed-form lateral force on an infinite line of dipoles carrying flux
/// `flux` (include the core factor in `flux` to model the iron-core system).
pub fn boyer_force_y(flux: f64, electron_position_xy: (f64, f64), speed: f64, constants: &PhysicalConstants) -> Result<f64> {
    let (x, y) = electron_position_xy;
    let r2 = x * x + y * y;
    if r2 == 0.0 {
        return Err(Error::Singularity("electron on the solenoid axis".into()));
    }
    Ok(flux * speed * constants.q() / (4.0 * PI) * 4.0 * x * y / (r2 * r2))
}

pub fn boyer_force_sample(
    flux: f64,
    electron_position: &Vector3<f64>,
    speed: f64,
    constants: &PhysicalConstants,
) -> Result<ForceSample> {
    let fy = boyer_force_y(flux, (electron_position.x, electron_position.y), speed, constants)?;
    Ok(ForceSample {
        electron_position: *electron_position,
        force: Vector3::new(0.0, fy, 0.0),
        method: ForceMethod::ClosedForm,
        error_estimate: None,
    })
}

/// Scales an air-core force by the relative permeability of the core.
pub fn core_enhancement(air_core_force: f64, core_permeability: f64) -> Result<f64> {
    ensure(core_permeability >= 1.0, || {
        format!("core permeability must be >= 1, got {core_permeability}")
    })?;
    Ok(air_core_force * core_permeability)
}

/// Fraction of the infinite-stack lateral force missing from a stack of
/// total length `length`, for an electron at cylindrical distance `rho`
/// in the stack's mid-plane, in the dipole-line limit:
///
/// `1 - h (2 h^2 + 3 rho^2) / (2 (rho^2 + h^2)^{3/2})`, `h = length / 2`.
///
/// Leading order `6 (rho / length)^4`.
pub fn truncation_fraction(length: f64, rho: f64) -> f64 {
    let h = 0.5 * length;
    let (h2, r2) = (h * h, rho * rho);
    1.0 - h * (2.0 * h2 + 3.0 * r2) / (2.0 * (r2 + h2).powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c() -> PhysicalConstants {
        PhysicalConstants::codata2018()
    }

    const A: f64 = 1.25e-3;
    const V: f64 = 3.751e6;

    fn stack(length_over_radius: f64, current: f64) -> LoopStack {
        LoopStack::with_length(A, length_over_radius * A, 3000.0, current).unwrap()
    }

    #[test]
    fn far_electron_feels_nothing() {
        let s = stack(10.0, 1e-3);
        let f = loop_force_quadrature(&s, &Vector3::new(1e6 * A, 3.0 * A, 0.0), V, &c(), 1e-9).unwrap();
        assert!(f.force.norm() < 1e-30, "{:e}", f.force.norm());
    }

    #[test]
    fn no_lateral_force_at_closest_approach() {
        let s = stack(100.0, 1e-3);
        let f = loop_force_quadrature(&s, &Vector3::new(10.0 * A, 0.0, 0.0), V, &c(), 1e-9).unwrap();
        assert!(f.force.y.abs() <= 1e-9 * f.force.norm());
    }

    #[test]
    fn single_loop_matches_point_dipole_far_away() {
        // far from a single loop the lateral force tends to 3 C m x y / R^5
        let s = LoopStack { loop_radius: A, loop_count: 1, axial_spacing: 1.0, loop_current: 2e-3 };
        let (x, y, z) = (200.0 * A, 150.0 * A, 40.0 * A);
        let f = loop_force_quadrature(&s, &Vector3::new(x, y, z), V, &c(), 1e-11).unwrap();
        let m = 2e-3 * PI * A * A;
        let r2 = x * x + y * y + z * z;
        let dipole = 3.0 * V * c().q() * c().mu0() / (4.0 * PI) * m * x * y / r2.powf(2.5);
        assert_relative_eq!(f.force.y, dipole, max_relative = 1e-3);
        assert!(f.error_estimate.unwrap() <= 1e-11 * f.force.norm());
    }

    #[test]
    fn quadrature_deviation_is_the_truncated_tail() {
        let c = c();
        for (lr, x, y) in [(100.0, 10.0, 10.0), (200.0, 20.0, 20.0), (120.0, 10.0, 5.0)] {
            let s = stack(lr, 1e-3);
            let f = loop_force_quadrature(&s, &Vector3::new(x * A, y * A, 0.0), V, &c, 1e-9).unwrap();
            let closed = boyer_force_y(s.equivalent_flux(&c), (x * A, y * A), V, &c).unwrap();
            let expected = 1.0 - truncation_fraction(s.length(), x.hypot(y) * A);
            assert_relative_eq!(f.force.y / closed, expected, max_relative = 2e-5);
        }
    }

    #[test]
    fn quadrature_is_linear_in_current_and_speed() {
        let p = Vector3::new(12.0 * A, 7.0 * A, 0.0);
        let base = loop_force_quadrature(&stack(20.0, 1e-3), &p, V, &c(), 1e-10).unwrap().force.y;
        let i10 = loop_force_quadrature(&stack(20.0, 1e-2), &p, V, &c(), 1e-10).unwrap().force.y;
        let v10 = loop_force_quadrature(&stack(20.0, 1e-3), &p, 10.0 * V, &c(), 1e-10).unwrap().force.y;
        assert_relative_eq!(i10, 10.0 * base, max_relative = 1e-9);
        assert_relative_eq!(v10, 10.0 * base, max_relative = 1e-9);
    }

    #[test]
    fn quadrature_lateral_force_is_odd_along_the_path() {
        let s = stack(50.0, 1e-3);
        for y in [2.0 * A, 9.0 * A, 40.0 * A] {
            let fp = loop_force_quadrature(&s, &Vector3::new(10.0 * A, y, 0.0), V, &c(), 1e-10).unwrap();
            let fm = loop_force_quadrature(&s, &Vector3::new(10.0 * A, -y, 0.0), V, &c(), 1e-10).unwrap();
            assert_relative_eq!(fp.force.y, -fm.force.y, max_relative = 1e-9);
        }
    }

    #[test]
    fn electron_on_a_wire_is_singular() {
        let s = stack(10.0, 1e-3);
        let on_wire = Vector3::new(A, 0.0, s.loop_z(3));
        assert!(matches!(
            loop_force_quadrature(&s, &on_wire, V, &c(), 1e-9),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn closed_form_values() {
        let c = c();
        assert_eq!(boyer_force_y(1e-9, (0.0, 0.01), V, &c).unwrap(), 0.0);
        assert_eq!(boyer_force_y(1e-9, (0.01, 0.0), V, &c).unwrap(), 0.0);
        let f = boyer_force_y(2.776e-9, (5e-3, 5e-3), 3.751e6, &c).unwrap();
        assert_relative_eq!(f, 5.31e-18, max_relative = 2e-3);
        assert!(matches!(boyer_force_y(1e-9, (0.0, 0.0), V, &c), Err(Error::Singularity(_))));
    }

    #[test]
    fn closed_form_parity_and_scaling() {
        let c = c();
        let f = |x: f64, y: f64| boyer_force_y(1e-9, (x, y), V, &c).unwrap();
        assert_eq!(f(-3e-3, -4e-3), f(3e-3, 4e-3));
        assert_eq!(f(3e-3, -4e-3), -f(3e-3, 4e-3));
        for d in [1e-3, 2e-3, 5e-3, 1e-2] {
            assert_relative_eq!(f(d, d) * d * d, f(1e-3, 1e-3) * 1e-6, max_relative = 1e-13);
        }
    }

    #[test]
    fn core_factor() {
        assert_eq!(core_enhancement(3.5e-18, 1.0).unwrap(), 3.5e-18);
        assert_eq!(core_enhancement(3.5e-18, 150.0).unwrap(), 3.5e-18 * 150.0);
        assert_eq!(core_enhancement(7e-18, 150.0).unwrap(), 2.0 * core_enhancement(3.5e-18, 150.0).unwrap());
        assert!(core_enhancement(1.0, 0.9).is_err());
    }

    #[test]
    fn truncation_fraction_limits() {
        assert!(truncation_fraction(1e6, 1.0) < 1e-20);
        let l = 100.0;
        assert_relative_eq!(truncation_fraction(l, 1.0), 6.0 / l.powi(4), max_relative = 1e-3);
        assert!(truncation_fraction(1e-9, 1.0) > 0.999_999);
    }
}
