//! `sofic`: command-line runner for the sofic-core experiments.
//!
//! Exit status: 0 success, 1 a VIOLATED verdict under `--strict` or failed
//! verification, 2 invalid configuration, 3 a degree limit or budget exceeded.
//! `SOFIC_THREADS` sets the worker-pool size.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    if let Some(threads) = std::env::var("SOFIC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // an existing global pool is fine; only the first call wins
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let cli = args::Cli::parse();
    match commands::dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
