//! `hyperjac` command-line front end.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad usage or
//! configuration, 3 a budget, resolution or resource limit was hit.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperjac::{Error, Workers};
use num_rational::Rational64;

#[derive(Parser)]
#[command(name = "hyperjac", version, about = "Hyperdeterminants, hyper-Jacobian minors and Sobolev rate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
pub struct Common {
    /// Worker threads; results are reproducible for a fixed count.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl Common {
    fn workers(&self) -> Workers {
        Workers::new(self.workers)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full signed determinant of a cubical matrix.
    Det {
        path: PathBuf,
        /// Use the layer-fold evaluation order.
        #[arg(long)]
        fold: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Determinant of a minor; one selector per direction, e.g. `1,2;1,3`.
    Minor {
        path: PathBuf,
        #[arg(long)]
        select: String,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized identity suites.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Trials per determinant law.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Random fields per field law.
        #[arg(long, default_value_t = 50)]
        field_trials: usize,
        /// Restrict the integration-by-parts suite to one order.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a counterexample family over a k schedule.
    Counterexample(CounterexampleArgs),
    /// W^{s,p} norm of a field over a box.
    Sobolev {
        path: PathBuf,
        #[arg(long, value_parser = rational)]
        s: Rational64,
        #[arg(long, value_parser = rational)]
        p: Rational64,
        /// Box as `lo,hi` for every axis or `lo,hi;lo,hi;...`; default unit cube.
        #[arg(long)]
        domain: Option<String>,
        /// Cells per axis of the pair grid.
        #[arg(long, default_value_t = 48)]
        grid: usize,
        /// Quadrature nodes per axis.
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        /// `none` or `gradient`.
        #[arg(long, default_value = "gradient")]
        correction: String,
        #[command(flatten)]
        common: Common,
    },
    /// Both sides of the integration-by-parts identity for a field.
    IbpCheck {
        path: PathBuf,
        /// Derivative order.
        #[arg(long)]
        m: usize,
        /// Components, then one derivative selector per order: `1,2;1,2`.
        #[arg(long)]
        select: String,
        /// Test function JSON; default is the plateau bump on (0, π)^N.
        #[arg(long)]
        psi: Option<PathBuf>,
        /// `default` or `power:a` with `0 < a < 1`.
        #[arg(long, default_value = "default")]
        chi: String,
        #[arg(long)]
        domain: Option<String>,
    },
}

#[derive(Args)]
pub struct CounterexampleArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long, value_parser = rational)]
    rho: Option<Rational64>,
    #[arg(long, value_parser = rational)]
    s: Option<Rational64>,
    #[arg(long, value_parser = rational)]
    p: Option<Rational64>,
    /// Comma-separated k values.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u64>>,
    /// `exact` or `reduced:<ratio>`.
    #[arg(long)]
    base: Option<String>,
    /// Skip the Sobolev norms.
    #[arg(long)]
    no_norms: bool,
    /// `none` or `gradient`.
    #[arg(long)]
    correction: Option<String>,
    /// `json` or `csv`.
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn rational(text: &str) -> Result<Rational64, String> {
    hyperjac::scalar::parse_rational(text).map_err(|e| e.to_string())
}

/// Maps library errors onto the exit-code contract.
fn exit_code(e: &Error) -> u8 {
    if e.is_resource() {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Det { path, fold, common } => commands::det(&path, fold, common),
        Command::Minor { path, select, common } => commands::minor(&path, &select, common),
        Command::Check {
            suite,
            seed,
            trials,
            field_trials,
            m,
            out,
            common,
        } => commands::check(&suite, seed, trials, field_trials, m, out.as_deref(), common),
        Command::Counterexample(args) => commands::counterexample(&args),
        Command::Sobolev {
            path,
            s,
            p,
            domain,
            grid,
            nodes,
            correction,
            common,
        } => commands::sobolev(&path, s, p, domain.as_deref(), grid, nodes, &correction, common),
        Command::IbpCheck {
            path,
            m,
            select,
            psi,
            chi,
            domain,
        } => commands::ibp_check(&path, m, &select, psi.as_deref(), &chi, domain.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hyperjac: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
