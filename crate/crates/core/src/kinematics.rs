//! Trajectory perturbations from the closed-form lateral force: velocity
//! change, lateral displacement, the two-sided displacement difference, the
//! resulting time delay and the phase comparison.
//!
//! Time integrals run in the angle variable `theta` with
//! `t = (|d| / v0) tan(theta)`, which maps the infinite passage onto
//! `(-pi/2, pi/2)` and turns the algebraically decaying force into a smooth
//! bounded integrand.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{ensure, Error, Result};
use crate::force::boyer_force_y;
use crate::model::{electron_speed_from_energy, PhysicalConstants, Side, TrajectorySpec};
use crate::quadrature::{adaptive, gauss_legendre_panel, AdaptiveOptions};

/// Half-window, in units of `|d| / v0`, used when none is given.
pub const DEFAULT_WINDOW_OVER_TIME_SCALE: f64 = 1e5;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Largest relative change of the displacement allowed between the half
/// window and the full window.
pub const WINDOW_CONVERGENCE: f64 = 1e-4;

const INITIAL_CELLS: usize = 256;
const MAX_CELLS: usize = 1 << 20;

pub fn default_time_window(trajectory: &TrajectorySpec) -> f64 {
    DEFAULT_WINDOW_OVER_TIME_SCALE * trajectory.time_scale()
}

/// Lateral velocity and displacement along one passage.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationProfile {
    pub times: Vec<f64>,
    pub delta_v_y: Vec<f64>,
    pub cumulative_delta_y: Vec<f64>,
    /// `|d| / v0` of the trajectory; sets the angle grid.
    pub time_scale: f64,
}

impl PerturbationProfile {
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        ensure(n >= 2, || "profile needs at least two samples".into())?;
        ensure(self.delta_v_y.len() == n && self.cumulative_delta_y.len() == n, || {
            "profile columns differ in length".into()
        })?;
        ensure(self.time_scale > 0.0, || "profile time scale must be positive".into())?;
        ensure(self.times.windows(2).all(|w| w[1] > w[0]), || {
            "profile times must be strictly increasing".into()
        })
    }

    pub fn peak_abs_delta_v(&self) -> f64 {
        self.delta_v_y.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Integrand of the displacement in the angle variable, `dv(theta) dt/dtheta`.
fn displacement_density(t: f64, dv: f64, tau: f64) -> (f64, f64) {
    let theta = (t / tau).atan();
    let c = theta.cos();
    (theta, dv * tau / (c * c))
}

/// Cumulative trapezoid in `theta` of the displacement density.
fn cumulative_displacement(times: &[f64], dv: &[f64], tau: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let (mut th_prev, mut g_prev) = displacement_density(times[0], dv[0], tau);
    let mut acc = 0.0;
    out.push(0.0);
    for (&t, &v) in times.iter().zip(dv).skip(1) {
        let (th, g) = displacement_density(t, v, tau);
        acc += 0.5 * (g + g_prev) * (th - th_prev);
        out.push(acc);
        th_prev = th;
        g_prev = g;
    }
    out
}

struct Passage {
    x: f64,
    speed: f64,
    tau: f64,
    flux: f64,
}

impl Passage {
    fn force(&self, t: f64, constants: &PhysicalConstants) -> f64 {
        boyer_force_y(self.flux, (self.x, self.speed * t), self.speed, constants).unwrap_or(0.0)
    }

    /// `F_y dt/dtheta / m`.
    fn acceleration_density(&self, theta: f64, constants: &PhysicalConstants) -> f64 {
        let c = theta.cos();
        self.force(self.tau * theta.tan(), constants) * self.tau / (c * c) / constants.m()
    }

    /// Lateral velocity on `n_cells` uniform angle cells over `[-theta_w, theta_w]`.
    fn velocity_grid(&self, theta_w: f64, n_cells: usize, constants: &PhysicalConstants) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut density = |theta: f64| self.acceleration_density(theta, constants);
        let lead_opts = AdaptiveOptions { rel_tol: 1e-12, abs_tol: 0.0, initial_panels: 1, max_nodes: 1 << 12 };
        let lead = adaptive(&mut density, -FRAC_PI_2, -theta_w, &lead_opts)?.value;

        let h = 2.0 * theta_w / n_cells as f64;
        let mut thetas = Vec::with_capacity(n_cells + 1);
        let mut dv = Vec::with_capacity(n_cells + 1);
        let mut acc = lead;
        thetas.push(-theta_w);
        dv.push(acc);
        for i in 0..n_cells {
            let lo = -theta_w + h * i as f64;
            let hi = if i + 1 == n_cells { theta_w } else { lo + h };
            acc += gauss_legendre_panel(&mut density, lo, hi);
            thetas.push(hi);
            dv.push(acc);
        }
        Ok((thetas, dv))
    }
}

/// Lateral velocity change `(1/m) int_{-inf}^{t} F_y dt'` sampled over
/// `[-time_window, time_window]`, refined until the implied displacement
/// is stable to `tolerance` relative.
pub fn velocity_perturbation(
    trajectory: &TrajectorySpec,
    flux: f64,
    constants: &PhysicalConstants,
    time_window: f64,
    tolerance: f64,
) -> Result<PerturbationProfile> {
    trajectory.validate()?;
    ensure(time_window > 0.0 && time_window.is_finite(), || {
        format!("time window must be positive, got {time_window}")
    })?;
    ensure(tolerance > 0.0, || format!("tolerance must be positive, got {tolerance}"))?;
    ensure(flux.is_finite(), || "flux must be finite".into())?;

    let passage = Passage {
        x: trajectory.x(),
        speed: trajectory.speed,
        tau: trajectory.time_scale(),
        flux,
    };
    let theta_w = (time_window / passage.tau).atan();

    // the lateral force peaks at |t| = tau / sqrt(3)
    let peak = passage.force(passage.tau / 3f64.sqrt(), constants).abs();
    let tail = passage
        .force(-time_window, constants)
        .abs()
        .max(passage.force(time_window, constants).abs());
    if tail > tolerance * peak {
        return Err(Error::Window(format!(
            "force at the window edge is {:e} of its peak; widen the window beyond {time_window:e} s",
            tail / peak
        )));
    }

    let mut cells = INITIAL_CELLS;
    let (thetas, mut dv) = passage.velocity_grid(theta_w, cells, constants)?;
    let mut times: Vec<f64> = thetas.iter().map(|th| passage.tau * th.tan()).collect();
    let mut cumulative = cumulative_displacement(&times, &dv, passage.tau);
    loop {
        cells *= 2;
        if cells > MAX_CELLS {
            return Err(Error::Convergence(format!(
                "velocity profile not stable to {tolerance:e} with {MAX_CELLS} cells"
            )));
        }
        let (th2, dv2) = passage.velocity_grid(theta_w, cells, constants)?;
        let times2: Vec<f64> = th2.iter().map(|th| passage.tau * th.tan()).collect();
        let cum2 = cumulative_displacement(&times2, &dv2, passage.tau);
        let (coarse, fine) = (cumulative[cumulative.len() - 1], cum2[cum2.len() - 1]);
        dv = dv2;
        times = times2;
        cumulative = cum2;
        if (fine - coarse).abs() <= tolerance * fine.abs() {
            break;
        }
    }
    Ok(PerturbationProfile { times, delta_v_y: dv, cumulative_delta_y: cumulative, time_scale: passage.tau })
}

/// Lateral displacement accumulated over the profile window. Fails if the
/// result still changes by more than [`WINDOW_CONVERGENCE`] between the half
/// window and the full window.
pub fn path_displacement(profile: &PerturbationProfile) -> Result<f64> {
    profile.validate()?;
    let tau = profile.time_scale;
    let cumulative = cumulative_displacement(&profile.times, &profile.delta_v_y, tau);
    let full = cumulative[cumulative.len() - 1];
    if full == 0.0 {
        return Ok(0.0);
    }

    let t_lo = profile.times[0];
    let t_hi = profile.times[profile.times.len() - 1];
    let at = |t: f64| -> f64 {
        // cumulative displacement at time t, linear in theta within a cell
        let i = profile.times.partition_point(|&s| s <= t).clamp(1, profile.times.len() - 1);
        let (th0, g0) = displacement_density(profile.times[i - 1], profile.delta_v_y[i - 1], tau);
        let (th1, g1) = displacement_density(profile.times[i], profile.delta_v_y[i], tau);
        let th = (t / tau).atan();
        let frac = if th1 > th0 { (th - th0) / (th1 - th0) } else { 0.0 };
        let g = g0 + frac * (g1 - g0);
        cumulative[i - 1] + 0.5 * (g0 + g) * (th - th0)
    };
    let half = at(0.5 * t_hi) - at(0.5 * t_lo);
    let change = (full - half).abs() / full.abs();
    if change > WINDOW_CONVERGENCE {
        return Err(Error::Window(format!(
            "displacement changes by {change:e} between half and full window"
        )));
    }
    Ok(full)
}

/// Two-sided displacement difference and the delay it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayPrediction {
    /// `dy(+) - dy(-)`, meters, signed.
    pub delta_y_total: f64,
    /// `|delta_y_total| / v0`, seconds.
    pub time_delay: f64,
    /// Sign of `delta_y_total`; the delay itself is reported as a magnitude.
    pub delay_sign: f64,
    pub flux_used: f64,
    pub speed_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicsOptions {
    pub window_over_time_scale: f64,
    pub tolerance: f64,
}

impl Default for KinematicsOptions {
    fn default() -> Self {
        Self { window_over_time_scale: DEFAULT_WINDOW_OVER_TIME_SCALE, tolerance: DEFAULT_TOLERANCE }
    }
}

pub fn displacement(trajectory: &TrajectorySpec, flux: f64, constants: &PhysicalConstants, opts: &KinematicsOptions) -> Result<f64> {
    let window = opts.window_over_time_scale * trajectory.time_scale();
    let profile = velocity_perturbation(trajectory, flux, constants, window, opts.tolerance)?;
    path_displacement(&profile)
}

/// `dY = dy(+) - dy(-)` for two paths passing on opposite sides at the same
/// speed and distance.
pub fn delta_y(
    trajectory_plus: &TrajectorySpec,
    trajectory_minus: &TrajectorySpec,
    flux: f64,
    constants: &PhysicalConstants,
) -> Result<DelayPrediction> {
    delta_y_with(trajectory_plus, trajectory_minus, flux, constants, &KinematicsOptions::default())
}

pub fn delta_y_with(
    trajectory_plus: &TrajectorySpec,
    trajectory_minus: &TrajectorySpec,
    flux: f64,
    constants: &PhysicalConstants,
    opts: &KinematicsOptions,
) -> Result<DelayPrediction> {
    trajectory_plus.validate()?;
    trajectory_minus.validate()?;
    let (p, m) = (trajectory_plus, trajectory_minus);
    ensure((p.speed - m.speed).abs() <= 1e-12 * p.speed, || {
        format!("trajectories differ in speed: {} vs {}", p.speed, m.speed)
    })?;
    ensure((p.impact_parameter.abs() - m.impact_parameter.abs()).abs() <= 1e-12 * p.impact_parameter.abs(), || {
        "trajectories differ in impact parameter".into()
    })?;
    ensure(p.side == Side::Plus && m.side == Side::Minus, || {
        "expected one plus-side and one minus-side trajectory, in that order".into()
    })?;

    let dy_plus = displacement(p, flux, constants, opts)?;
    let dy_minus = displacement(m, flux, constants, opts)?;
    let delta = dy_plus - dy_minus;
    Ok(DelayPrediction {
        delta_y_total: delta,
        time_delay: delta.abs() / p.speed,
        delay_sign: if delta == 0.0 { 0.0 } else { delta.signum() },
        flux_used: flux,
        speed_used: p.speed,
    })
}

/// Delay a force-mediated phase shift would impose: `Phi q / (m v0^2)`.
pub fn time_delay_eq4(flux: f64, speed: f64, constants: &PhysicalConstants) -> Result<f64> {
    ensure(speed > 0.0 && speed.is_finite(), || format!("speed must be positive, got {speed}"))?;
    Ok(flux * constants.q() / (constants.m() * speed * speed))
}

/// `q Phi / hbar`.
pub fn ab_phase(flux: f64, constants: &PhysicalConstants) -> f64 {
    constants.q() * flux / constants.hbar()
}

/// `p_y dy / hbar`.
pub fn semiclassical_phase(momentum: f64, displacement: f64, constants: &PhysicalConstants) -> f64 {
    momentum * displacement / constants.hbar()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair {
    pub ab_phase: f64,
    pub semiclassical_phase: f64,
}

impl PhasePair {
    pub fn relative_deviation(&self) -> f64 {
        let diff = (self.semiclassical_phase - self.ab_phase).abs();
        if diff == 0.0 {
            0.0
        } else if self.ab_phase == 0.0 {
            diff
        } else {
            diff / self.ab_phase.abs()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReport {
    pub phases: PhasePair,
    pub relative_deviation: f64,
    pub prediction: DelayPrediction,
}

/// Compares the phase from the integrated displacement with `q Phi / hbar`.
///
/// The displacement entering the semiclassical phase is that of the
/// minus-side path relative to the plus-side path, `dy(-) - dy(+)`, which
/// carries the sign of the flux.
pub fn phase_equivalence_report(
    trajectory_plus: &TrajectorySpec,
    trajectory_minus: &TrajectorySpec,
    flux: f64,
    constants: &PhysicalConstants,
) -> Result<PhaseReport> {
    let prediction = delta_y(trajectory_plus, trajectory_minus, flux, constants)?;
    let momentum = constants.m() * prediction.speed_used;
    let phases = PhasePair {
        ab_phase: ab_phase(flux, constants),
        semiclassical_phase: semiclassical_phase(momentum, 0.0 - prediction.delta_y_total, constants),
    };
    Ok(PhaseReport { phases, relative_deviation: phases.relative_deviation(), prediction })
}

/// Transit-time change from the attraction to a grounded conducting plane
/// at distance `clearance`, held over `interaction_length`:
/// `U = -q^2 / (16 pi eps0 clearance)`, `dt = L (1/v(E) - 1/v(E + |U|))`.
///
/// Returns the magnitude in seconds. The solenoid current does not enter.
pub fn image_charge_delay(
    clearance: f64,
    interaction_length: f64,
    kinetic_energy_ev: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    ensure(clearance > 0.0, || format!("clearance must be positive, got {clearance}"))?;
    ensure(interaction_length > 0.0, || format!("interaction length must be positive, got {interaction_length}"))?;
    let v0 = electron_speed_from_energy(kinetic_energy_ev, constants)?;
    let q = constants.q();
    let well = q * q / (16.0 * PI * constants.eps0() * clearance);
    let energy = kinetic_energy_ev * constants.ev();
    if well >= energy {
        return Err(Error::ModelValidity(format!(
            "image potential {:e} eV is not small against {kinetic_energy_ev} eV",
            well / constants.ev()
        )));
    }
    let v1 = (2.0 * (energy + well) / constants.m()).sqrt();
    // 1/v0 - 1/v1 without cancellation
    let dv = 2.0 * well / constants.m() / (v0 + v1);
    Ok(interaction_length * dv / (v0 * v1))
}

/// Default shield geometry for the image-charge estimate: 1 mm clearance, 1 cm path.
pub const DEFAULT_IMAGE_CLEARANCE: f64 = 1e-3;
pub const DEFAULT_IMAGE_LENGTH: f64 = 1e-2;
