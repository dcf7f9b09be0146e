use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kamstab_cli::{merge_config, parse_config_text, run, CliError, ConfigError, Experiment};

#[derive(Parser)]
#[command(name = "kamstab", version, about = "Robust and fragile conserved quantities: experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for random models and states.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override a config leaf, e.g. `--set grid.points=500`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Print only errors.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Split an observable into non-conserved, robust and fragile parts.
    Decompose,
    /// Isospectral resummation of a perturbation.
    Kam,
    /// Evaluate the closed-form drift bounds.
    Bounds,
    /// Divergence and drift trajectories on a time grid.
    Evolve,
    /// Robust/fragile contrast on a Heisenberg chain.
    HeisenbergFig,
    /// Monotones of a dephasing qubit with and without a drive.
    LindbladDemo,
    /// Run the acceptance checks; exits nonzero if any fails.
    Verify,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Decompose => Experiment::Decompose,
            Command::Kam => Experiment::Kam,
            Command::Bounds => Experiment::Bounds,
            Command::Evolve => Experiment::Evolve,
            Command::HeisenbergFig => Experiment::HeisenbergFig,
            Command::LindbladDemo => Experiment::LindbladDemo,
            Command::Verify => Experiment::Verify,
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let c = cli.common;
    let file = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("", format!("{}: {e}", path.display())))?;
            Some(parse_config_text(&text).map_err(|e| ConfigError::new(e.path, format!("{}: {}", path.display(), e.message)))?)
        }
        None => None,
    };
    let (echo, cfg) = merge_config(cli.command.experiment(), file, c.seed, c.out, &c.overrides)?;
    let outcome = run(&cfg, &echo)?;
    if !c.quiet {
        for line in &outcome.summary {
            println!("{line}");
        }
        println!("artifacts written to {}", outcome.output_dir.display());
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
