use std::process::ExitCode;

use clap::Parser;
use gkpforge_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let kind = match e {
                CliError::Refused(_) => "refused",
                CliError::Validation(_) => "invalid input",
                CliError::Numerical(_) => "numerical failure",
            };
            eprintln!("gkpforge: {kind}: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
