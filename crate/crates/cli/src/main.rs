use std::io;
use std::process::ExitCode;

use clap::Parser;
use quizbn_cli::{ask, load_model, simulate_to, summary_table, validate, Cli, CliError, Command};

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => {
            let report = simulate_to(&args, &mut io::stdout().lock())?;
            eprint!("{}", summary_table(&report));
        }
        Command::Validate { model } => println!("{}", validate(&model)?),
        Command::Ask { model } => {
            let model = load_model(&model)?;
            ask(&model, io::stdin().lock(), io::stdout().lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
