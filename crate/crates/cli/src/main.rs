mod args;
mod commands;
mod inputs;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = write!(io::stdout(), "{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("fluxsim: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Spectrum(a) => commands::spectrum_cmd(a),
        Command::Budget(a) => commands::budget_cmd(a),
        Command::Invert(a) => commands::invert_cmd(a),
        Command::Table1(a) => commands::table1_cmd(a),
        Command::Fit(a) => commands::fit_cmd(a),
        Command::Synth(a) => commands::synth_cmd(a),
        Command::Couple(a) => commands::couple_cmd(a),
        Command::Chi(a) => commands::chi_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fluxsim: {}", e.to_string().replace('\n', " "));
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
