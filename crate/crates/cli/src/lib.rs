//! Command-line front end: resolves a run configuration, calls into
//! `bec-dimer-core` and writes CSV/JSON artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use bec_dimer_core::model::from_trap;
use clap::{Parser, Subcommand};

pub use config::{load_config, resolve, Resolved, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "bec-dimer", version, about = "Two-mode condensate: spectra, dynamics, portraits, Husimi maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config entry, e.g. `--set kappa=0.02` or `--set trap.q0=3`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels with doublet and inflection analysis.
    Spectrum,
    /// Quantum and mean-field time evolution from a coherent state.
    Evolve,
    /// Fixed points, their stability and the bifurcation condition.
    FixedPoints,
    /// Mean-field trajectories from a seed lattice, with JO/MST classes.
    Portrait,
    /// Husimi function of the evolved state at the requested times.
    Husimi,
    /// Bifurcation, MST fraction and doublets along a kappa or eta sweep.
    Sweep,
    /// Print the resolved parameters.
    Params {
        /// Compute the couplings from the trap block.
        #[arg(long)]
        from_trap: bool,
    },
}

/// Runs one invocation. Warnings go to stderr; `params` prints to stdout.
pub fn run(cli: &Cli) -> CliResult<()> {
    let config = load_config(cli.config.as_deref(), &cli.set)?;

    if let Command::Params { from_trap: true } = cli.command {
        let trap = config
            .trap
            .ok_or_else(|| CliError::invalid("--from-trap needs a trap block"))?;
        let n = config.n_particles.ok_or_else(|| CliError::invalid("N is required"))?;
        let derived = from_trap(&trap, n)?;
        print!("{}", output::to_json(&derived)?);
        return Ok(());
    }

    let res = resolve(config)?;
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    let out = cli.out.as_path();
    match cli.command {
        Command::Spectrum => commands::cmd_spectrum(&res, out).map(drop),
        Command::Evolve => commands::cmd_evolve(&res, out).map(drop),
        Command::FixedPoints => commands::cmd_fixed_points(&res, out).map(drop),
        Command::Portrait => commands::cmd_portrait(&res, out).map(drop),
        Command::Husimi => commands::cmd_husimi(&res, out).map(drop),
        Command::Sweep => commands::cmd_sweep(&res, out).map(drop),
        Command::Params { .. } => {
            print!("{}", output::to_json(&res.echo)?);
            Ok(())
        }
    }
}
