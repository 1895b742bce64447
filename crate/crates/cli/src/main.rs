use clap::Parser;
use dqcd_cli::{Cli, CliError, EXIT_UNSTABLE};

fn main() {
    let cli = Cli::parse();
    match dqcd_cli::run(&cli) {
        Ok(summary) => println!("{summary}"),
        Err(CliError::Unstable(summary)) => {
            println!("{summary}");
            std::process::exit(EXIT_UNSTABLE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
