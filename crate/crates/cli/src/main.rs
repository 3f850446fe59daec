use std::process::ExitCode;

use clap::Parser;
use geomgate_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Fit { output, .. } => print!("{output}"),
                CliError::Invariant(report) => print!("{report}"),
                _ => {}
            }
            match &e {
                CliError::Invariant(_) => eprintln!("geomgate: self-test failed"),
                _ => eprintln!("geomgate: {e}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
