use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shockform_cli::{commands, exit_code, load_scenario, RunOptions};

/// Construct, evolve, and verify multidimensional shock formation and
/// decay for scalar conservation laws.
#[derive(Parser)]
#[command(name = "shockform", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Output directory for CSV dumps and the run report.
    #[arg(long, default_value = "out", global = true)]
    out: PathBuf,

    /// Override the scenario's cells-per-axis resolution.
    #[arg(long, global = true)]
    resolution: Option<usize>,

    /// Override the scenario's output times (comma separated).
    #[arg(long, value_delimiter = ',', global = true)]
    times: Option<Vec<f64>>,

    /// Front-propagation time step.
    #[arg(long, global = true)]
    front_dt: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the profile bundle; dump K/tau0 tables and the initial field.
    Construct,
    /// Breaking times, focus envelope, and propagated fronts.
    EvolveChar,
    /// Finite-volume oracle run with field dumps.
    EvolveFvm,
    /// L1 and front-distance tables, characteristics vs oracle.
    Compare,
    /// Jump verdicts on the declared front.
    Stability,
    /// Rarefaction-fan construction and dumps.
    Decay,
    /// Run the invariant suite; one pass/fail line per property.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(scenario_path) = cli.scenario.as_ref() else {
        eprintln!("error: --scenario <path> is required");
        return ExitCode::from(1);
    };
    let scenario = match load_scenario(scenario_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let opts = RunOptions {
        out_dir: cli.out.clone(),
        resolution: cli.resolution,
        times: cli.times.clone(),
        front_dt: cli.front_dt,
    };
    let result = match cli.command {
        Command::Construct => commands::construct(&scenario, &opts),
        Command::EvolveChar => commands::evolve_char(&scenario, &opts),
        Command::EvolveFvm => commands::evolve_fvm(&scenario, &opts),
        Command::Compare => commands::compare(&scenario, &opts),
        Command::Stability => commands::stability(&scenario, &opts),
        Command::Decay => commands::decay(&scenario, &opts),
        Command::Verify => commands::verify(&scenario, &opts),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
