//! Experiment runner for generalized coined quantum walks.
//!
//! Every subcommand produces a [`Report`]: a table plus ordered parameters
//! and summary values, rendered as CSV with a `#` metadata header or as JSON.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command, Format};
pub use error::{CliError, ErrorKind};
pub use report::{Cell, Report};

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::RecurrenceSweep(a) => commands::recurrence_sweep(a),
        Command::MultiRecurrence(a) => commands::multi_recurrence(a),
        Command::SigmaDynamics(a) => commands::sigma_dynamics(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::BlochCompare(a) => commands::bloch_compare(a),
        Command::Localization(a) => commands::localization(a),
        Command::Evolve(a) => commands::evolve_dump(a),
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

/// Runs a command and writes its output; returns the rendered text.
pub fn execute(command: &Command) -> Result<String, CliError> {
    let report = run(command)?;
    let output = command.output();
    let text = render(&report, output.format);
    match &output.out {
        Some(path) => std::fs::write(path, &text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(text)
}

/// Parses `args`, runs, and returns the process exit code. Failures print a
/// one-line JSON diagnostic on stderr.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            e.kind.exit_code()
        }
    }
}
