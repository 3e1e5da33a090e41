#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod failure;
mod input;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format};
use failure::{Failure, Outcome, Status};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::SUCCESS,
                _ => ExitCode::from(Status::Input as u8),
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mmot: {f}");
            ExitCode::from(f.status as u8)
        }
    }
}

fn execute(cli: &Cli) -> Outcome<()> {
    let g = &cli.global;
    if let Some(jobs) = g.jobs {
        if jobs == 0 {
            return Err(Failure::input("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| Failure::numerical(e.to_string()))?;
    }
    let (text, unverified) = if let (Command::Selftest, Format::Csv) = (&cli.command, g.format) {
        let (_, text, passed) = commands::selftest(g.seed);
        if !passed {
            emit(g.out.as_deref(), &text)?;
            return Err(Failure::numerical("selftest failed"));
        }
        (text, 0)
    } else {
        let table = commands::run(&cli.command, g.seed)?;
        (table.render(g.format)?, table.uncertified)
    };
    emit(g.out.as_deref(), &text)?;
    if unverified > 0 && (g.require_certified || matches!(cli.command, Command::Selftest)) {
        return Err(Failure::numerical(format!("{unverified} result(s) not certified")));
    }
    Ok(())
}

fn emit(out: Option<&std::path::Path>, text: &str) -> Outcome<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}
