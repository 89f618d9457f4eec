use std::process::ExitCode;

use clap::Parser;
use torsion_flow::io::{run_cli, Cli};

fn main() -> ExitCode {
    run_cli(Cli::parse())
}
