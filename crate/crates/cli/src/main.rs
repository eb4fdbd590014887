mod args;
mod commands;
mod failure;
mod prepare;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use failure::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot start {threads} workers: {e}")))?;
    }
    match &cli.command {
        Command::Embed(a) => commands::embed(a),
        Command::Eval(a) => commands::eval(a),
        Command::Exact(a) => commands::exact(a),
        Command::Cluster(a) => commands::cluster(a),
        Command::Norm(a) => commands::norm(a),
        Command::Replay(a) => commands::replay(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
