//! Experiment harness for the `ddl` binary.
//!
//! Each subcommand merges its flags over an optional JSON config, runs the
//! experiment through `ddl-core`, and writes CSV: a `#` line naming the
//! command, schema and resolved parameters, a header, then rows in a fixed
//! order. Reruns with the same parameters produce identical bytes.

pub mod args;
pub mod config;
pub mod error;
pub mod runners;
pub mod table;

use std::io::Write;
use std::path::Path;

pub use args::{Cli, Command};
pub use error::{CliError, Result};
pub use runners::Outputs;

/// Runs the selected experiment on the configured thread pool.
pub fn run(cli: &Cli) -> Result<Outputs> {
    let config = cli.config.as_deref();
    let job = || match &cli.command {
        Command::BernoulliSweep(a) => runners::bernoulli_sweep(&config::merge(a, config)?),
        Command::ModelSelect(a) => runners::model_select(&config::merge(a, config)?),
        Command::Regression(a) => runners::regression(&config::merge(a, config)?),
        Command::NnToy(a) => runners::nn_toy(&config::merge(a, config)?),
        Command::AnalysisCurves(a) => runners::analysis_curves(&config::merge(a, config)?),
    };
    match cli.threads {
        Some(0) => Err(CliError::Config("thread count must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {t} threads: {e}")))?
            .install(job),
        None => job(),
    }
}

fn write_to(path: &Path, text: &str) -> Result<()> {
    if path == Path::new("-") {
        std::io::stdout().lock().write_all(text.as_bytes())?;
    } else {
        std::fs::write(path, text)?;
    }
    Ok(())
}

/// Runs and writes every table.
pub fn execute(cli: &Cli) -> Result<()> {
    let out = run(cli)?;
    write_to(&cli.out, &out.main.render())?;
    for (path, table) in &out.extra {
        write_to(path, &table.render())?;
    }
    Ok(())
}
