//! The `landau` command-line tool: closed-form Landau states, the hard-wall
//! spectrum, the integral transform, classical orbits and an invariant
//! suite, each writing CSV/PNG artifacts and a replayable `manifest.json`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use crate::cli::{resolve, Cli, Command};
use crate::error::CliError;
use crate::manifest::Run;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 success, 1 failure, 2 usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(CliError::Usage(msg)) => {
            let mut cmd = Cli::command();
            cmd.build();
            let name = cli.command.name();
            let sub = cmd.find_subcommand_mut(name).expect("subcommand exists");
            let kind = if msg.contains("required") {
                ErrorKind::MissingRequiredArgument
            } else {
                ErrorKind::ValueValidation
            };
            let _ = sub.error(kind, msg).print();
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let settings = resolve(cli)?;
    // Validate the shared inputs before touching the output directory.
    settings.params()?;
    settings.grid()?;
    let mut run = Run::start(cli.command.name(), settings, &cli.common.out, cli.common.json)?;
    let outcome = match &cli.command {
        Command::Eval(_) => commands::eval::run(&mut run),
        Command::Spectrum(_) => commands::spectrum::run(&mut run),
        Command::Transform(_) => commands::transform::run(&mut run),
        Command::Orbit(_) => commands::orbit::run(&mut run),
        Command::Verify(_) => commands::verify::run(&mut run),
        Command::Params(_) => commands::params::run(&mut run),
    };
    let ok = matches!(outcome, Ok(true));
    run.finish(ok)?;
    outcome
}
