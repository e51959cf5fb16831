use std::process::ExitCode;

use clap::Parser;
use splitfuzz_cli::args::{Cli, Command};
use splitfuzz_cli::{commands, service, UsageError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => commands::cmd_simulate(a).map(|_| ()),
        Command::Sweep(a) => commands::cmd_sweep(a).map(|_| ()),
        Command::Sysid(a) => commands::cmd_sysid(a).map(|_| ()),
        Command::Serve(a) => service::serve_blocking(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
