//! Arrival time against beam energy and the fitted power law.
use abtof::analysis::fit_ballistic;
use abtof::experiment::{sweep_energy, ApparatusConfig, TofSpectrum};

fn main() -> abtof::Result<()> {
    let cfg = ApparatusConfig { rng_seed: 11, ..ApparatusConfig::default() };
    let energies = [20.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0];
    let spectra = sweep_energy(&cfg, &energies)?;
    for s in &spectra {
        println!("{:>5} eV  mean {:.6e} s  sd {:.2e} s", s.energy_ev, s.mean(), s.variance().sqrt());
    }
    let means: Vec<f64> = spectra.iter().map(TofSpectrum::mean).collect();
    let errs: Vec<f64> = spectra.iter().map(TofSpectrum::standard_error).collect();
    let fit = fit_ballistic(&energies, &means, &errs, &cfg.constants)?;
    println!(
        "t ~ E^{:.5} (+- {:.1e}), flight length {:.5} m (configured {} m)",
        fit.exponent, fit.exponent_stderr, fit.length_estimate, cfg.flight_path_length
    );
    Ok(())
}
