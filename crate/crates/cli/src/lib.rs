//! Command-line front end for `coreshape`.

pub mod args;
pub mod commands;
pub mod error;
pub mod presets;
pub mod rre_greedy;

use std::io::Write;

pub use args::{Cli, Command};
pub use error::{CliError, Result};

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "COREShape_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`] when it is set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a pool that already exists (tests, repeated calls) keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => commands::gen(a, out),
        Command::Singvals(a) => commands::singvals(a, out),
        Command::Solve(a) => commands::solve(a, out),
        Command::Sweep(a) => commands::sweep(a, out),
        Command::Pareto(a) => commands::pareto(a, out),
        Command::Rre(a) => commands::rre_cmd(a, out),
        Command::Tree(a) => commands::tree(a, out),
    }
}
