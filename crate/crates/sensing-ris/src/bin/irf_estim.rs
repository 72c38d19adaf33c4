//! Command-line experiment driver. Exit codes: 0 on success, 2 on config
//! errors, 3 on numerical failures.

use clap::error::ErrorKind;
use clap::Parser;
use sensing_ris::harness::{run, ExperimentConfig, ExperimentId, HarnessError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "irf-estim",
    version,
    about = "Sensing-RIS phase-estimation and beamforming experiments",
    after_help = "Experiments: crlb-map, mse-vs-k, mse-vs-gamma, spectral-efficiency, \
                  expansion-error.\nThe config file is flat key = value text; unknown keys \
                  are rejected. --seed and --trials\noverride the config when given."
)]
struct Cli {
    /// Experiment to run.
    experiment: String,
    /// Path to the config file.
    #[arg(long)]
    config: PathBuf,
    /// RNG seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trials per grid point (overrides the config).
    #[arg(long)]
    trials: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    match try_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("irf-estim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn try_main(cli: Cli) -> Result<(), HarnessError> {
    let experiment: ExperimentId = cli.experiment.parse()?;
    let mut cfg = ExperimentConfig::from_file(&cli.config, Some(experiment))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    let table = run(&cfg, cli.threads)?;
    table.validate()?;
    table.write_csv(&cli.out)?;
    println!(
        "{}: wrote {} ({} rows x {} columns, seed {}, {} trials)",
        cfg.experiment,
        cli.out.display(),
        table.rows.len(),
        table.columns.len(),
        cfg.seed,
        cfg.trials
    );
    for (key, value) in &table.info {
        if key != "build" {
            println!("  {key} = {value}");
        }
    }
    Ok(())
}
