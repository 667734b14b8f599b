use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thermoform_cli::{apply_cap, run_command, Command, CAP_VAR};

/// Induced and nonlinear topological pressure on subshifts of finite type.
#[derive(Debug, Parser)]
#[command(name = "thermoform", version)]
struct Args {
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: String,
    /// CSV output path (default: the config's output.csv_path, else stdout).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// SVG plot path for freeze-sweep.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Overrides parameters.seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = apply_cap(std::env::var(CAP_VAR).ok())
        .and_then(|_| run_command(args.command, &args.config, args.csv, args.svg, args.seed));
    match result {
        Ok(summary) => {
            for line in summary {
                eprintln!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("thermoform: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
