//! Experiment runner for replay-buffer update strategies.
//!
//! Every option can also be set in a `--config` file of `key = value` lines
//! named after the long flags. Flags override the file, the file overrides
//! built-in defaults. Exit status is 0 on success, 1 on runtime failure and
//! 2 on usage or configuration errors.

mod bench;
mod common;
mod gen;
mod oracle_gap;
mod params;
mod run;

use std::ffi::OsString;

use clap::Command;

pub use params::{parse_config, CliError, SEED_ENV};

pub fn cli() -> Command {
    Command::new("ocdm")
        .about("Memory-update strategies for multi-label data streams")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(run::command())
        .subcommand(oracle_gap::command())
        .subcommand(bench::command())
        .subcommand(gen::command())
}

/// Runs the command line and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut cmd = cli();
    let matches = match cmd.try_get_matches_from_mut(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let sub_cmd = cmd.find_subcommand(name).expect("known subcommand");
    let result = params::Params::resolve(sub_cmd, sub).and_then(|p| match name {
        "run" => run::execute(&p),
        "oracle-gap" => oracle_gap::execute(&p),
        "bench" => bench::execute(&p),
        "gen" => gen::execute(&p),
        _ => unreachable!("unregistered subcommand {name}"),
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("ocdm {name}: {msg}");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("ocdm {name}: {e:#}");
            1
        }
    }
}
