//! Command-line front end: `solve`, `convergence` and `stability`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use args::{Cli, Command};
pub use error::{CliError, Result};

/// Exit code for an unstable verdict; every other failure exits with 1.
pub const EXIT_UNSTABLE: i32 = 2;

/// Dispatch a parsed command line. `Ok` carries the stdout summary.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Convergence(a) => commands::convergence(a),
        Command::Stability(a) => commands::stability(a),
    }
}
