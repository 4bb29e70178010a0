//! Flux of the bench solenoid, its AB phase, and the force-hypothesis delay.
use abtof::kinematics::{ab_phase, time_delay_eq4};
use abtof::model::{electron_speed_from_energy, flux, PhysicalConstants, SolenoidSpec};

fn main() -> abtof::Result<()> {
    let c = PhysicalConstants::codata2018();
    let v0 = electron_speed_from_energy(40.0, &c)?;
    println!("40 eV electron: v0 = {v0:.4e} m/s");
    println!("{:>10} {:>14} {:>12} {:>14}", "I [mA]", "Phi [Wb]", "phase [rad]", "delay [s]");
    for ma in [0.0, 1.0, 2.0, 5.0, 10.0] {
        let spec = SolenoidSpec::bench(ma * 1e-3);
        let phi = flux(&spec, &c)?.flux;
        println!("{ma:>10.1} {phi:>14.5e} {:>12.4} {:>14.5e}", ab_phase(phi, &c), time_delay_eq4(phi, v0, &c)?);
    }
    Ok(())
}
