mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::{CliError, CliResult};

/// Caps the worker pool when `LONGI_THREADS` is set.
fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("LONGI_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("LONGI_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size thread pool: {e}")))
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Trajectory(a) => commands::trajectory(cli, a),
        Command::Snr(a) => commands::snr(cli, a),
        Command::Design(a) => commands::design(cli, a),
        Command::Constellation(a) => commands::constellation_cmd(cli, a),
        Command::Montecarlo(a) => commands::montecarlo(cli, a),
        Command::ValidateConfig(a) => commands::validate_config(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
