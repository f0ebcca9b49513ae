//! `tier`: parse, type-check, infer, run and measure programs.
//!
//! Exit codes: 0 success or typable, 1 untypable (or a failed check),
//! 2 unreadable or malformed input, 3 stuck guard, 4 fuel exhausted.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context::new(&cli);
    let result = match &cli.command {
        Command::Parse(a) => commands::parse(&ctx, a),
        Command::Check(a) => commands::check(&ctx, a),
        Command::Infer(a) => commands::infer(&ctx, a),
        Command::Run(a) => commands::run(&ctx, a),
        Command::Analyze(a) => commands::analyze(&ctx, a),
        Command::CorpusCheck(a) => commands::corpus_check(&ctx, a),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status() as u8)
        }
    }
}
