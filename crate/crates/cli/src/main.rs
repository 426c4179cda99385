//! `strebel`: command-line front end for the ray-distance evaluators,
//! dilatation sweeps and the modulus oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Globals, QcGrid};
use grid::Grid;
use output::Format;

#[derive(Parser)]
#[command(name = "strebel", version, about = "Asymptotic distance between Strebel rays")]
struct Cli {
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; oracle defaults to json, everything else to csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Lattice resolution for the oracle, grid size for node sweeps.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Seed for sampled checks (rotates the K(Q) sample grid).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a cylinder decomposition. Exit 0 if valid, 1 if not.
    Validate { path: PathBuf },
    /// Lower bound, upper bound 1/2 log K(F_t) and the limit, per t.
    Distance {
        pair: PathBuf,
        /// t grid, `a:b:step` or a comma list.
        #[arg(long = "t", allow_hyphen_values = true)]
        t: Option<Grid>,
    },
    /// Limit value against the shift alpha of the second ray.
    Shift {
        pair: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<Grid>,
    },
    /// Dilatations of the assembled maps over t, or of the node correction over eps'.
    QcSweep {
        params: PathBuf,
        #[arg(long = "t", conflicts_with = "eps", allow_hyphen_values = true)]
        t: Option<Grid>,
        #[arg(long)]
        eps: Option<Grid>,
    },
    /// Conformal modulus of a quadrilateral or annulus.
    Oracle { domain: PathBuf },
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    let g = Globals {
        format: cli.format,
        resolution: cli.resolution,
        seed: cli.seed,
    };
    let outcome = match cli.command {
        Command::Validate { path } => commands::validate(&path, &g)?,
        Command::Distance { pair, t } => commands::distance(&pair, t.map(|g| g.0), &g)?,
        Command::Shift { pair, alpha } => commands::shift(&pair, alpha.map(|g| g.0), &g)?,
        Command::QcSweep { params, t, eps } => {
            let grid = match (t, eps) {
                (Some(t), _) => Some(QcGrid::T(t.0)),
                (None, Some(e)) => Some(QcGrid::Eps(e.0)),
                (None, None) => None,
            };
            commands::qc_sweep(&params, grid, &g)?
        }
        Command::Oracle { domain } => commands::oracle(&domain, &g)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => print!("{}", outcome.text),
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("STREBEL_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => ExitCode::from(o.code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
