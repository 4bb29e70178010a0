//! Image-charge slowing near a conducting surface compared with the force-hypothesis delay.
use abtof::kinematics::{image_charge_delay, time_delay_eq4};
use abtof::model::{electron_speed_from_energy, flux, PhysicalConstants, SolenoidSpec};

fn main() -> abtof::Result<()> {
    let c = PhysicalConstants::codata2018();
    let v = electron_speed_from_energy(40.0, &c)?;
    let force = time_delay_eq4(flux(&SolenoidSpec::bench(10e-3), &c)?.flux, v, &c)?;
    println!("force-hypothesis delay at 10 mA: {force:.3e} s");
    for clearance in [1e-4, 3e-4, 1e-3, 3e-3] {
        let img = image_charge_delay(clearance, 1e-2, 40.0, &c)?;
        println!("clearance {clearance:.0e} m: image delay {img:.3e} s ({:.2e} of force delay)", img / force);
    }
    Ok(())
}
