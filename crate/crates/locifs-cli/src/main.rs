//! `locifs`: attractors, code spaces, shadowing diagnostics, β-expansions, parameter
//! sweeps and graph-directed embeddings from the command line.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

const AFTER_HELP: &str = "\
Builtin systems (--system):
  superfractal   Sierpinski maps, X_3 cut at height --param (default 0.3)
  nonsemicont    four maps, X_4 = [1-t,1]^2 with t = --param (default 0.3)
  exshift2       sequence-space example over {0,1,2}; --level sets the cylinder window
  beta-golden    β-derived system for the golden mean
  beta-sparse    β-derived system for the sparse gap list (1,2,3,4,5)
  gd-2cycle      two-vertex cycle graph embedded as a local IFS
  markov2        two maps satisfying the Markov criterion
  global2        two maps with full domains and separated images
Sweep families: superfractal, nonsemicont, beta1d.

Exit codes:
  0  success
  1  I/O error
  2  invalid arguments, configuration or system
  3  attractor iteration did not converge
  4  certified negative result under --assert";

#[derive(Debug, Parser)]
#[command(name = "locifs", version, about = "Local iterated function systems at finite resolution", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Builtin system name.
    #[arg(long, conflicts_with = "config")]
    pub system: Option<String>,
    /// System description in TOML.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Grid level (2^level cells per axis), or the cylinder window of sequence systems.
    #[arg(long)]
    pub level: Option<u8>,
    /// Family parameter: β for superfractal and β-derived systems, t for nonsemicont.
    #[arg(long)]
    pub param: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exit with code 4 on a certified negative result.
    #[arg(long)]
    pub assert: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Attractor image and iteration report.
    Attractor {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// Stop once a Hausdorff step is at most this (0: iterate to a fixpoint).
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Code words, SFT test and follower-set counts.
    Codespace {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Largest step k tried by the SFT test.
        #[arg(long, default_value_t = 5)]
        max_step: usize,
        /// Sub-alphabet for β-derived systems, e.g. "0,2,4".
        #[arg(long)]
        restrict: Option<String>,
    },
    /// Pseudo-orbit, shadow search and gap curve.
    Shadow {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 32)]
        horizon: usize,
        /// Comma-separated δ values for the gap curve.
        #[arg(long)]
        gap_deltas: Option<String>,
    },
    /// Expansion of 1, Parry classification and word counts.
    Beta {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        /// Length of the counted words.
        #[arg(long, default_value_t = 10)]
        words: usize,
        #[arg(long)]
        restrict: Option<String>,
    },
    /// Attractors over a parameter grid with jump and semicontinuity checks.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated parameter values.
        #[arg(long)]
        params: Option<String>,
        #[arg(long, default_value_t = 0.15)]
        threshold: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Graph-directed embedding: matrix, Markov criterion, fiber equations.
    Embed {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
