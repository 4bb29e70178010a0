//! Field kernels: the instantaneous magnetic field of a slowly moving point
//! charge, and the vector potential of an ideal solenoid together with its
//! line integral around closed contours.

use nalgebra::Vector3;
use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};
use crate::model::{flux, PhysicalConstants, SolenoidSpec};
use crate::quadrature::{adaptive, AdaptiveOptions};

/// Closest approach to a point source before the field is considered singular.
pub const SINGULARITY_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub position: Vector3<f64>,
    pub b_field: Vector3<f64>,
}

/// Magnetic field at `field_point` of a charge `q` at `electron_position`
/// moving with velocity `speed * y_hat`:
///
/// `B = (v0 q mu0 / 4 pi) ((z - z_e) x_hat - (x - x_e) z_hat) / |r - r_e|^3`
///
/// The y-component is identically zero.
pub fn moving_charge_b_field(
    field_point: &Vector3<f64>,
    electron_position: &Vector3<f64>,
    speed: f64,
    constants: &PhysicalConstants,
) -> Result<Vector3<f64>> {
    let r = field_point - electron_position;
    let dist = r.norm();
    if dist < SINGULARITY_GUARD {
        return Err(Error::Singularity(format!(
            "field point within {dist:e} m of the moving charge"
        )));
    }
    let prefactor = speed * constants.q() * constants.mu0() / (4.0 * PI);
    let inv_r3 = 1.0 / (dist * dist * dist);
    Ok(Vector3::new(prefactor * r.z * inv_r3, 0.0, -prefactor * r.x * inv_r3))
}

pub fn sample_moving_charge_field(
    field_point: Vector3<f64>,
    electron_position: &Vector3<f64>,
    speed: f64,
    constants: &PhysicalConstants,
) -> Result<FieldSample> {
    let b_field = moving_charge_b_field(&field_point, electron_position, speed, constants)?;
    Ok(FieldSample { position: field_point, b_field })
}

/// Cylindrical decomposition of a point about the solenoid axis: returns
/// the radial vector (perpendicular to the axis) and its length.
fn radial_part(point: &Vector3<f64>, spec: &SolenoidSpec) -> (Vector3<f64>, f64) {
    let r = point - spec.center_position;
    let rho_vec = r - spec.axis * r.dot(&spec.axis);
    let rho = rho_vec.norm();
    (rho_vec, rho)
}

/// Azimuthal vector potential of an infinitely long ideal solenoid,
/// `A_phi = B0 rho / 2` inside the bore and `Phi / (2 pi rho)` outside.
pub fn ideal_solenoid_vector_potential(
    field_point: &Vector3<f64>,
    spec: &SolenoidSpec,
    constants: &PhysicalConstants,
) -> Result<Vector3<f64>> {
    let phi = flux(spec, constants)?.flux;
    Ok(vector_potential_for_flux(field_point, spec, phi))
}

fn vector_potential_for_flux(field_point: &Vector3<f64>, spec: &SolenoidSpec, phi: f64) -> Vector3<f64> {
    let (rho_vec, rho) = radial_part(field_point, spec);
    if rho == 0.0 {
        return Vector3::zeros();
    }
    let a = spec.bore_radius;
    let a_phi = if rho < a {
        phi * rho / (2.0 * PI * a * a)
    } else {
        phi / (2.0 * PI * rho)
    };
    spec.axis.cross(&rho_vec) * (a_phi / rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Right-handed about the solenoid axis.
    Ccw,
    Cw,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContourShape {
    /// Closed polygon; the last vertex connects back to the first.
    Polygon(Vec<Vector3<f64>>),
    /// Circle in the plane through `center` perpendicular to the solenoid axis.
    Circle { center: Vector3<f64>, radius: f64 },
}

/// A closed integration path. For polygons `Ccw` walks the vertices in the
/// order given and `Cw` walks them backwards; for circles the orientation is
/// measured about the solenoid axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub shape: ContourShape,
    pub orientation: Orientation,
}

impl Contour {
    pub fn polygon(vertices: Vec<Vector3<f64>>) -> Self {
        Self { shape: ContourShape::Polygon(vertices), orientation: Orientation::Ccw }
    }

    pub fn circle(center: Vector3<f64>, radius: f64) -> Self {
        Self { shape: ContourShape::Circle { center, radius }, orientation: Orientation::Ccw }
    }

    pub fn reversed(mut self) -> Self {
        self.orientation = match self.orientation {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        };
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.shape {
            ContourShape::Polygon(v) => {
                ensure(v.len() >= 3, || format!("polygon needs at least 3 vertices, got {}", v.len()))?;
                for i in 0..v.len() {
                    let j = (i + 1) % v.len();
                    ensure((v[j] - v[i]).norm() > 0.0, || {
                        format!("polygon vertices {i} and {j} coincide")
                    })?;
                }
                Ok(())
            }
            ContourShape::Circle { radius, .. } => {
                ensure(*radius > 0.0 && radius.is_finite(), || format!("circle radius must be positive, got {radius}"))
            }
        }
    }
}

/// In-plane orthonormal pair `(e1, e2)` with `e1 x e2 = axis`.
fn transverse_basis(axis: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if axis.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (helper - axis * helper.dot(axis)).normalize();
    let e2 = axis.cross(&e1);
    (e1, e2)
}

fn check_clear_of_envelope(contour: &Contour, spec: &SolenoidSpec) -> Result<()> {
    let a = spec.bore_radius;
    let crosses = |lo: f64, hi: f64| lo <= a && a <= hi;
    match &contour.shape {
        ContourShape::Polygon(v) => {
            for i in 0..v.len() {
                let (p0, rho0) = radial_part(&v[i], spec);
                let (p1, rho1) = radial_part(&v[(i + 1) % v.len()], spec);
                let d = p1 - p0;
                let dd = d.norm_squared();
                let s = if dd > 0.0 { (-p0.dot(&d) / dd).clamp(0.0, 1.0) } else { 0.0 };
                let lo = (p0 + d * s).norm();
                if crosses(lo, rho0.max(rho1)) {
                    return Err(Error::Geometry(format!("contour edge {i} meets the solenoid bore")));
                }
            }
        }
        ContourShape::Circle { center, radius } => {
            let (_, offset) = radial_part(center, spec);
            if crosses((offset - radius).abs(), offset + radius) {
                return Err(Error::Geometry("circular contour meets the solenoid bore".into()));
            }
        }
    }
    Ok(())
}

/// Line integral of the ideal-solenoid vector potential around `contour`, in
/// webers. Each polygon edge (or the whole circle) is integrated with
/// adaptive Gauss-Legendre until successive refinements agree to
/// `tolerance` relative, or `tolerance * |Phi|` absolute.
pub fn contour_integral_a(
    contour: &Contour,
    spec: &SolenoidSpec,
    constants: &PhysicalConstants,
    tolerance: f64,
) -> Result<f64> {
    ensure(tolerance > 0.0, || format!("tolerance must be positive, got {tolerance}"))?;
    contour.validate()?;
    let phi = flux(spec, constants)?.flux;
    check_clear_of_envelope(contour, spec)?;

    let sign = match contour.orientation {
        Orientation::Ccw => 1.0,
        Orientation::Cw => -1.0,
    };
    let opts = |pieces: usize| AdaptiveOptions {
        initial_panels: 2,
        rel_tol: tolerance,
        abs_tol: tolerance * phi.abs() / pieces as f64,
        max_nodes: 1 << 16,
    };

    let total = match &contour.shape {
        ContourShape::Polygon(v) => {
            let n = v.len();
            let mut sum = 0.0;
            for i in 0..n {
                let a = v[i];
                let edge = v[(i + 1) % n] - a;
                let est = adaptive(
                    |s: f64| vector_potential_for_flux(&(a + edge * s), spec, phi).dot(&edge),
                    0.0,
                    1.0,
                    &opts(n),
                )?;
                sum += est.value;
            }
            sum
        }
        ContourShape::Circle { center, radius } => {
            let (e1, e2) = transverse_basis(&spec.axis);
            let est = adaptive(
                |t: f64| {
                    let (s, c) = t.sin_cos();
                    let p = center + (e1 * c + e2 * s) * *radius;
                    let dl = (e2 * c - e1 * s) * *radius;
                    vector_potential_for_flux(&p, spec, phi).dot(&dl)
                },
                0.0,
                2.0 * PI,
                &opts(1),
            )?;
            est.value
        }
    };
    Ok(sign * total)
}
