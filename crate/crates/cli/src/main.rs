use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qwalk_cli::{compile, parse_run_config, run, CliError, CompileDirection, RunOptions};
use qwalk_core::optics::NetToWalkOptions;
use qwalk_core::walk::{DEFAULT_MAX_WALKERS, HARD_MAX_WALKERS};

#[derive(Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Multi-walker quantum walk simulator and walk/optics compiler"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the walk described by a config file and write distributions.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_WALKERS,
              help = format!("Walker cap for this run (at most {HARD_MAX_WALKERS})"))]
        max_walkers: usize,
    },
    /// Compile a walk into an optical network or a network into a walk.
    Compile {
        direction: CompileDirection,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// net-to-walk: share coin layers between elements on disjoint positions.
        #[arg(long)]
        batch: bool,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out_dir,
            max_walkers,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|source| CliError::Io {
                path: config.display().to_string(),
                source,
            })?;
            let cfg = parse_run_config(&text)?;
            let report = run(&cfg, &out_dir, &RunOptions { max_walkers })?;
            println!("wrote {} to {}", report.files.join(", "), out_dir.display());
        }
        Command::Compile {
            direction,
            input,
            out,
            batch,
        } => {
            let report = compile(
                direction,
                &input,
                &out,
                NetToWalkOptions {
                    batch_parallel: batch,
                },
            )?;
            println!(
                "wrote {} (mode-map distance {:e})",
                out.display(),
                report.mode_map_distance
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
