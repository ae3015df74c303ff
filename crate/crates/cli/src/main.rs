//! `roundclique` command-line front end.

mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::de::DeserializeOwned;
use serde::Serialize;

use config::{apply_overrides, load_overrides, Cli, Command, RunConfig, UsageError};

fn resolve<A: Serialize + DeserializeOwned + Clone>(
    args: &A,
    name: &'static str,
    cli: &Cli,
) -> anyhow::Result<(A, RunConfig)> {
    let (args, threads) = match &cli.config {
        Some(p) => {
            let (a, t) = apply_overrides(args, name, &load_overrides(p)?)?;
            (a, t.or(cli.threads))
        }
        None => (args.clone(), cli.threads),
    };
    let cfg = RunConfig::new(name, threads, &args);
    Ok((args, cfg))
}

fn execute(cli: &Cli) -> anyhow::Result<commands::Outcome> {
    macro_rules! run {
        ($a:expr, $f:path) => {{
            let (a, cfg) = resolve($a, cli.command.name(), cli)?;
            if let Some(t) = cfg.threads {
                if t == 0 {
                    return config::usage("threads must be >= 1");
                }
                // fails only if a pool already exists, which is harmless
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            $f(&a, &cfg)
        }};
    }
    match &cli.command {
        Command::Simulate(a) => run!(a, commands::simulate),
        Command::Bounds(a) => run!(a, commands::bounds),
        Command::Verify(a) => run!(a, commands::verify),
        Command::Optimize(a) => run!(a, commands::optimize),
        Command::Table1(a) => run!(a, commands::table1),
        Command::Transcript(a) => run!(a, commands::transcript),
    }
}

/// Parses `argv`, runs the subcommand and writes its artifacts. Returns the
/// process exit status: 0 on success, 1 on a runtime failure or a failed
/// check, 2 on bad arguments.
pub fn run_command<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    let start = Instant::now();
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return if e.is::<UsageError>() { 2 } else { 1 };
        }
    };
    for (path, body) in &outcome.artifacts {
        if let Err(e) = report::write_atomic(path, body.as_bytes()) {
            eprintln!("error: {e:#}");
            return 1;
        }
    }
    for line in &outcome.summary {
        println!("{line}");
    }
    for (path, _) in &outcome.artifacts {
        println!("wrote {}", path.display());
    }
    eprintln!("{}: {:.2} s", cli.command.name(), start.elapsed().as_secs_f64());
    match outcome.failure {
        Some(f) => {
            eprintln!("failed: {f}");
            1
        }
        None => 0,
    }
}

fn main() -> ExitCode {
    ExitCode::from(run_command(std::env::args_os()))
}
