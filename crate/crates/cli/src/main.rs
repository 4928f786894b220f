use std::process::ExitCode;

use clap::Parser;
use ktc_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ktc: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
