//! `ssal`: generate instances, solve them, run the enumeration oracle,
//! cross-check the projection and benchmark seeded families.
//!
//! Exit codes: 0 converged or check passed, 1 error, 2 not converged,
//! 3 check failure. `SSAL_LOG` (`off`, `info`, `trace`) sets log verbosity on
//! standard error.

mod args;
mod commands;
mod records;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SSAL_LOG", "off")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Solve(a) => commands::solve(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Check(a) => commands::check(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::EXIT_ERROR)
        }
    }
}
