use std::process::ExitCode;

use clap::Parser;
use outcrop_cli::Cli;

fn main() -> ExitCode {
    match outcrop_cli::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
