use std::process::ExitCode;

use clap::Parser;
use ddl_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ddl {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
