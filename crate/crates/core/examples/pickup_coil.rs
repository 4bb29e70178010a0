//! EMF in a pick-up coil around the solenoid for a stepped current waveform.
use abtof::experiment::pickup_emf;
use abtof::model::{flux, PhysicalConstants, SolenoidSpec};

fn main() -> abtof::Result<()> {
    let c = PhysicalConstants::codata2018();
    let spec = SolenoidSpec::bench(0.0);
    let waveform = [(0.0, 0.0), (1e-3, 0.0), (1.01e-3, 10e-3), (3e-3, 10e-3), (3.02e-3, 0.0), (4e-3, 0.0)];
    let turns = 50;
    let trace = pickup_emf(&waveform, &spec, turns, &c)?;
    for (k, emf) in trace.emf.iter().enumerate() {
        println!("{:.3e} .. {:.3e} s  emf {emf:+.4e} V", trace.times[k], trace.times[k + 1]);
    }
    let dphi = flux(&spec.with_current(10e-3), &c)?.flux;
    let recovered = -trace.integrate(0.0, 2e-3) / turns as f64;
    println!("flux step {dphi:.6e} Wb, from the EMF {recovered:.6e} Wb");
    Ok(())
}
