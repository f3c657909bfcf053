use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sqzvac::cli::{execute, Command};

#[derive(Parser)]
#[command(
    name = "sqzvac",
    version,
    about = "Two-level atom in a finite-bandwidth squeezed vacuum"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Io {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress warnings.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reservoir spectra N(x) and |M(x)| on a grid.
    Spectra(Io),
    /// Steady state by closed form, linear solve and long-time integration.
    SteadyState(Io),
    /// Bloch trajectory with density-matrix diagnostics.
    Dynamics(Io),
    /// Decay parameter, coherence time and dwell ratio.
    Timescales(Io),
    /// Weak-value dwell times for a measurement window.
    Zeno(Io),
    /// Squeezing phase at which the decay parameter vanishes.
    Sustainability(Io),
    /// Timescales over a one-parameter grid.
    Sweep(Io),
}

fn main() -> ExitCode {
    // Usage errors share the configuration-error status.
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, io) = match args.command {
        Cmd::Spectra(io) => (Command::Spectra, io),
        Cmd::SteadyState(io) => (Command::SteadyState, io),
        Cmd::Dynamics(io) => (Command::Dynamics, io),
        Cmd::Timescales(io) => (Command::Timescales, io),
        Cmd::Zeno(io) => (Command::Zeno, io),
        Cmd::Sustainability(io) => (Command::Sustainability, io),
        Cmd::Sweep(io) => (Command::Sweep, io),
    };
    let code = execute(command, &io.config, io.out.as_deref(), io.quiet);
    ExitCode::from(code as u8)
}
