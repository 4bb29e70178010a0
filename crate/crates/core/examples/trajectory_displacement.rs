//! Lateral velocity and displacement of electrons passing either side of the solenoid.
use abtof::kinematics::{delta_y, phase_equivalence_report, velocity_perturbation, default_time_window};
use abtof::model::{electron_speed_from_energy, flux, PhysicalConstants, Side, SolenoidSpec, TrajectorySpec};

fn main() -> abtof::Result<()> {
    let c = PhysicalConstants::codata2018();
    let v = electron_speed_from_energy(40.0, &c)?;
    let phi = flux(&SolenoidSpec::bench(1e-3), &c)?.flux;
    let plus = TrajectorySpec::new(v, 5e-3, Side::Plus)?;

    let profile = velocity_perturbation(&plus, phi, &c, default_time_window(&plus), 1e-9)?;
    let step = profile.times.len() / 12;
    println!("{:>14} {:>14} {:>14}", "t [s]", "dv_y [m/s]", "dy [m]");
    for k in (0..profile.times.len()).step_by(step.max(1)) {
        println!("{:>14.4e} {:>14.4e} {:>14.4e}", profile.times[k], profile.delta_v_y[k], profile.cumulative_delta_y[k]);
    }

    let pred = delta_y(&plus, &plus.mirrored(), phi, &c)?;
    println!("dY = {:.6e} m, delay = {:.6e} s", pred.delta_y_total, pred.time_delay);
    let report = phase_equivalence_report(&plus, &plus.mirrored(), phi, &c)?;
    println!(
        "AB phase {:.8} rad, semiclassical {:.8} rad, deviation {:.2e}",
        report.phases.ab_phase, report.phases.semiclassical_phase, report.relative_deviation
    );
    Ok(())
}
