mod args;
mod config;
mod data;
mod dist;
mod error;
mod fit;
mod groups;
mod report;
mod simulate;

use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return CliError::usage(e.render().to_string().trim_end()).report(),
    };
    let result = match cli.command {
        Command::Fit(a) => fit::run(a),
        Command::Anova(a) => groups::run(a, false),
        Command::Ttest(a) => groups::run(a, true),
        Command::Dist(a) => dist::run(a),
        Command::Simulate(a) => simulate::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
