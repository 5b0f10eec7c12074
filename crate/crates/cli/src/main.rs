use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toposheaf_cli::CliError;
use toposheaf_core::sheaf::DEFAULT_TOLERANCE;

#[derive(Parser)]
#[command(name = "toposheaf", version, about = "Build, check and simulate filter sheaf networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify that every path of restriction maps agrees.
    Check {
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Simulate and write a `tick,site,kind,value` CSV trace.
    Run {
        config: PathBuf,
        #[arg(long)]
        ticks: Option<usize>,
        /// Write the trace here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Print the evaluation order.
    Schedule {
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Run the reference difference equation directly.
    Oracle {
        #[arg(long)]
        n: usize,
        /// Feedback coefficients a_1..a_n, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<f64>,
        /// Feedforward coefficients b_0..b_n, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<f64>,
        #[arg(long)]
        input: String,
        #[arg(long)]
        ticks: usize,
    },
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let text = match command {
        Command::Check { config, tol } => toposheaf_cli::check(&config, tol)?,
        Command::Run { config, ticks, out, tol } => {
            let csv = toposheaf_cli::run(&config, ticks, tol)?;
            if let Some(path) = out {
                std::fs::write(&path, csv).map_err(|e| CliError::Io {
                    path,
                    message: e.to_string(),
                })?;
                return Ok(());
            }
            csv
        }
        Command::Schedule { config, tol } => toposheaf_cli::schedule(&config, tol)?,
        Command::Oracle { n, a, b, input, ticks } => toposheaf_cli::oracle(n, &a, &b, &input, ticks)?,
    };
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
