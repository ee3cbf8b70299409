mod args;
mod commands;
mod config;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use isac_core::Error;

use args::{Cli, Command};
use commands::InvalidReport;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.is::<InvalidReport>()) {
        return 5;
    }
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Infeasible { .. }) => 2,
        Some(Error::NotConverged { .. } | Error::RdNotConverged { .. }) => 3,
        Some(Error::TooLarge { .. }) => 4,
        _ => 1,
    }
}

fn resolved<T>(cli: &Cli, flags: &T) -> Result<T>
where
    T: serde::Serialize + serde::de::DeserializeOwned,
{
    let table = match &cli.config {
        Some(path) => config::load_table(path, cli.command.name())?,
        None => None,
    };
    config::merge(flags, table)
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Capacity(a) => commands::capacity(&resolved(cli, a)?),
        Command::Sweep(a) => commands::sweep(&resolved(cli, a)?),
        Command::Rd(a) => commands::rd(&resolved(cli, a)?),
        Command::Binary(a) => commands::binary(&resolved(cli, a)?),
        Command::Simulate(a) => commands::simulate(&resolved(cli, a)?),
        Command::Validate(a) => commands::validate(&resolved(cli, a)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
