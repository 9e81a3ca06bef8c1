use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use morrey_core::cli::{exit_code_for, run_with, Cli};

fn main() -> ExitCode {
    let config = Cli::parse().into_config();
    let outcome = match run_with(&config, |line| eprintln!("{line}")) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e) as u8);
        }
    };
    let written = match &config.output {
        Some(path) => std::fs::write(path, &outcome.report),
        None => std::io::stdout().write_all(outcome.report.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(morrey_core::cli::EXIT_DOMAIN as u8);
    }
    ExitCode::from(outcome.exit_code as u8)
}
