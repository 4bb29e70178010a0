use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use abtof::commands::{self, EXIT_VALIDATION};
use abtof::config::RunConfig;
use abtof::experiment::ForceMode;

#[derive(Parser)]
#[command(name = "abtof", version, about = "Aharonov-Bohm force-hypothesis checks and time-of-flight simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (default: `out_dir` from the config, else ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_parser = ["force_present", "force_absent"])]
    mode: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Loop-stack quadrature against the closed-form lateral force.
    VerifyForce,
    /// Force-hypothesis delay and flux phase versus current.
    PredictDelay,
    /// Time-of-flight sweeps, delay fit and verdict.
    Simulate,
    /// Semiclassical phase from the integrated displacement against q Phi / hbar.
    PhaseCheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_VALIDATION as u8);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = &cli.mode {
        cfg.mode = mode.parse::<ForceMode>().expect("validated by clap");
    }
    let out = cli.out.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));

    let result = match cli.command {
        Command::VerifyForce => commands::cmd_verify_force(&cfg, &out),
        Command::PredictDelay => commands::cmd_predict_delay(&cfg, &out),
        Command::Simulate => commands::cmd_simulate(&cfg, &out),
        Command::PhaseCheck => commands::cmd_phase_check(&cfg, &out),
    };
    match &result {
        Ok(outcome) => outcome.summary.iter().for_each(|line| println!("{line}")),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(commands::exit_code(&result) as u8)
}
