use std::process::ExitCode;

use clap::Parser;
use confluent_susy::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(&Cli::parse()))
}
