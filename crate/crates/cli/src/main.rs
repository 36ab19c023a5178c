//! Command-line driver: flags pick the command and the configuration
//! source; all numerics live in sectioned key = value config files or
//! built-in presets. Exit codes: 0 success (including NOT_CONVERGED runs),
//! 2 configuration error, 3 numerical failure, 1 I/O failure.

mod commands;
mod config;
mod presets;

use clap::{Args, Parser, Subcommand};
use mhfem::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mhfem",
    about = "Moving-habitat reaction-diffusion solver",
    after_help = "Presets: test1, test2, humped, decreasing, sharply_decreasing, \
                  disk_highbias, disk_nobias, shrink.\n\
                  Set MHFEM_OUTPUT_ROOT to relocate all output directories."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Source {
    /// Path to a TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset name; file keys override preset keys.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the mesh of a configuration and write it with a quality report.
    Mesh(Source),
    /// Time-step the configured scenario, writing snapshots and a report.
    Run(Source),
    /// Manufactured-solution convergence study with an order table.
    Converge(Source),
    /// Cross-validate a strip run against the 1D finite-difference solver.
    Validate(Source),
    /// Re-export a stored final state as VTK or CSV.
    Export {
        #[command(flatten)]
        source: Source,
        /// Output format: "vtk" or "csv".
        #[arg(long, default_value = "vtk")]
        format: String,
        /// Directory holding final_state.csv (defaults to the configured
        /// output directory).
        #[arg(long)]
        from: Option<PathBuf>,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::Geometry(_) | Error::MeshTopology(_) => 2,
        Error::Solve(_) | Error::Divergence { .. } | Error::Eval(_) | Error::Horizon(_) => 3,
        Error::Io { .. } => 1,
    }
}

fn load(source: &Source) -> mhfem::error::Result<config::Resolved> {
    let cfg = config::load_config(source.preset.as_deref(), source.config.as_deref())?;
    config::resolve(&cfg)
}

fn dispatch(cli: Cli) -> mhfem::error::Result<()> {
    match cli.cmd {
        Cmd::Mesh(s) => commands::cmd_mesh(&load(&s)?),
        Cmd::Run(s) => commands::cmd_run(&load(&s)?),
        Cmd::Converge(s) => commands::cmd_converge(&load(&s)?),
        Cmd::Validate(s) => commands::cmd_validate(&load(&s)?),
        Cmd::Export {
            source,
            format,
            from,
        } => commands::cmd_export(&load(&source)?, from, &format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
