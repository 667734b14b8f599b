//! Batch front end for `thermoform`: JSON configurations in, CSV tables and
//! SVG sweep plots out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::io::Write;
use std::path::PathBuf;

pub use config::{parse_config, render_config, Command, RunConfig};
pub use error::CliError;
pub use output::{format_number, render_sweep_svg, write_csv, Table};
pub use run::{execute, Destinations, Outcome};

/// Environment variable overriding the enumeration cap.
pub const CAP_VAR: &str = "THERMOFORM_CAP";

pub fn apply_cap(value: Option<String>) -> Result<(), CliError> {
    if let Some(v) = value {
        let cap: usize = v.trim().parse().ok().filter(|&c| c > 0).ok_or(CliError::Cap(v.clone()))?;
        thermoform::set_enumeration_cap(cap);
    }
    Ok(())
}

/// Reads the config, runs the command and writes the artifacts. The CSV
/// goes to standard output when no path is configured.
pub fn run_command(
    command: Command,
    config_path: &str,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|source| CliError::ReadConfig { path: config_path.to_string(), source })?;
    let config = parse_config(&text)?;
    let dest = Destinations::resolve(&config, csv, svg);
    let outcome = execute(command, &config, seed)?;
    match &dest.csv {
        Some(path) => write_csv(&outcome.table, path)?,
        None => {
            let bytes = outcome.table.to_csv()?;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
    }
    if let (Some(path), Some(svg)) = (&dest.svg, &outcome.svg) {
        std::fs::write(path, svg).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    if let Some((failed, total)) = outcome.failed_checks {
        for line in &outcome.summary {
            eprintln!("{line}");
        }
        return Err(CliError::VerifyFailed(failed, total));
    }
    Ok(outcome.summary)
}
