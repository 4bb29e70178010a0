//! Simulated current sweep in both modes and the resulting verdicts.
use abtof::commands::run_current_sweep;
use abtof::config::RunConfig;
use abtof::experiment::ForceMode;

fn main() -> abtof::Result<()> {
    for mode in [ForceMode::ForceAbsent, ForceMode::ForcePresent] {
        let cfg = RunConfig { seed: 2024, mode, ..RunConfig::default() };
        let sim = run_current_sweep(&cfg)?;
        println!("{mode:?}");
        for i in 0..sim.curve.currents.len() {
            println!(
                "  {:>6.2} mA  delay {:>11.3e} +- {:.2e} s",
                sim.curve.currents[i] * 1e3,
                sim.curve.measured_delays[i],
                sim.curve.delay_errors[i]
            );
        }
        let r = &sim.report;
        println!(
            "  slope {:.3e} +- {:.2e} s/A (hypothesis {:.3e}), z0 {:.1}, z4 {:.1}, verdict {}",
            r.slope, r.slope_stderr, sim.eq4_slope, r.z_against_zero, r.z_against_eq4, r.verdict.as_str()
        );
    }
    Ok(())
}
