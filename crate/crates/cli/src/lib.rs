//! Library side of the `toposheaf` command: config parsing, network
//! assembly and the subcommand implementations.

pub mod config;
pub mod csv;
pub mod error;
pub mod signal;

use std::path::Path;

use toposheaf_core::engine;
use toposheaf_core::oracle::iir_reference;
use toposheaf_core::sheaf::{FilterCoefficients, FilterSheafNetwork};

pub use config::NetworkConfig;
pub use error::CliError;
pub use signal::SignalSpec;

/// Default number of ticks when neither the config nor the caller sets one.
pub const DEFAULT_TICKS: usize = 16;

/// Loads and assembles a network, refusing inconsistent ones.
pub fn load_consistent(path: &Path, tol: f64) -> Result<(NetworkConfig, FilterSheafNetwork), CliError> {
    let config = NetworkConfig::load(path)?;
    let net = config.build()?;
    // Resolve input references up front so every subcommand rejects them alike.
    config.streams(&net, 0, &config::base_dir(path))?;
    let report = net.check(tol);
    if !report.is_consistent() {
        return Err(CliError::Inconsistent(report));
    }
    Ok((config, net))
}

pub fn check(path: &Path, tol: f64) -> Result<String, CliError> {
    load_consistent(path, tol).map(|_| "consistent\n".to_string())
}

pub fn run(path: &Path, ticks: Option<usize>, tol: f64) -> Result<String, CliError> {
    let (config, net) = load_consistent(path, tol)?;
    let ticks = ticks.or(config.ticks).unwrap_or(DEFAULT_TICKS);
    let streams = config.streams(&net, ticks, &config::base_dir(path))?;
    let trace = engine::run(&net, &streams, ticks)?;
    Ok(csv::trace_csv(&trace))
}

pub fn schedule(path: &Path, tol: f64) -> Result<String, CliError> {
    let (_, net) = load_consistent(path, tol)?;
    Ok(engine::schedule(&net)?.to_string())
}

/// Runs the reference difference equation on one signal.
pub fn oracle(n: usize, a: &[f64], b: &[f64], input: &str, ticks: usize) -> Result<String, CliError> {
    let invalid = |at: &str, message: String| CliError::Invalid {
        at: at.to_string(),
        message,
    };
    if a.len() != n {
        return Err(invalid("--a", format!("expected {n} coefficients, found {}", a.len())));
    }
    if b.len() != n + 1 {
        return Err(invalid("--b", format!("expected {} coefficients, found {}", n + 1, b.len())));
    }
    let c = FilterCoefficients::new(a.to_vec(), b.to_vec()).map_err(|e| invalid("--a/--b", e.to_string()))?;
    let samples = SignalSpec::parse(input)
        .samples(ticks, Path::new("."))
        .map_err(|m| invalid("--input", m))?;
    Ok(csv::series_csv(&iir_reference(&c, &samples)))
}
