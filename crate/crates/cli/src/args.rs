use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Simulation and verification workbench for parity-check magic-state distillation.
#[derive(Debug, Parser)]
#[command(name = "paritycheck", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every circuit identity at random angles.
    VerifyIdentities(VerifyArgs),
    /// Exhaustive noisy simulation of the full protocol.
    Simulate(SimulateArgs),
    /// Evaluate the analytic bounds at one noise point.
    Bounds(BoundsArgs),
    /// Input/output accounting and concatenation cost.
    Overhead(OverheadArgs),
    /// Triorthogonal matrix checks and searches.
    Triortho(TriorthoArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyIdentities(_) => "verify-identities",
            Command::Simulate(_) => "simulate",
            Command::Bounds(_) => "bounds",
            Command::Overhead(_) => "overhead",
            Command::Triortho(t) => match t.action {
                TriorthoAction::Check { .. } => "triortho check",
                TriorthoAction::Search { .. } => "triortho search",
                TriorthoAction::LemmaD { .. } => "triortho lemma-d",
                TriorthoAction::Complete14 => "triortho complete-14",
            },
        }
    }

    pub fn format(&self) -> Format {
        match self {
            Command::VerifyIdentities(a) => a.format,
            Command::Simulate(a) => a.format,
            Command::Bounds(a) => a.format,
            Command::Overhead(a) => a.format,
            Command::Triortho(a) => a.format,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Number of input pairs.
    #[arg(long = "n", value_parser = clap::value_parser!(u8).range(1..=3))]
    pub n: u8,
    /// Seed for the random test angles.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random angles.
    #[arg(long, default_value_t = 5)]
    pub angles: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long = "n", value_parser = clap::value_parser!(u8).range(1..=3))]
    pub n: u8,
    /// Angle in radians or as a multiple of pi (`pi/8`, `3pi/16`); a comma list
    /// gives one angle per pair.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
    /// Resource fault model: uniform, single, worst, or custom:<file>.
    #[arg(long, default_value = "uniform")]
    pub model: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Evaluate the exact polynomials at these rates.
    #[arg(long)]
    pub eps_theta: Option<f64>,
    #[arg(long)]
    pub eps_hash: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Also draw this many Monte Carlo samples at the given rates.
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long = "n", value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 0.0)]
    pub eps_theta: f64,
    /// T-state error feeding the resource preparation.
    #[arg(long, conflicts_with = "eps_hash")]
    pub eps_pi8: Option<f64>,
    /// Resource error given directly.
    #[arg(long)]
    pub eps_hash: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct OverheadArgs {
    /// this-work, bravyi-haah, mek or dcp.
    #[arg(long)]
    pub family: String,
    /// Output count.
    #[arg(long, conflicts_with = "pairs")]
    pub k: Option<usize>,
    /// Pair count.
    #[arg(long = "N", id = "pairs")]
    pub pairs: Option<usize>,
    /// Concatenation depth; needs --eps-in.
    #[arg(long, requires = "eps_in")]
    pub levels: Option<usize>,
    #[arg(long)]
    pub eps_in: Option<f64>,
    /// Include the closed-form acceptance probability per level.
    #[arg(long)]
    pub success_model: bool,
    /// Leading coefficient c of the map eps -> c eps^2, overriding the stored one.
    #[arg(long)]
    pub coefficient: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct TriorthoArgs {
    #[command(subcommand)]
    #[serde(flatten)]
    pub action: TriorthoAction,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum TriorthoAction {
    /// Check a matrix file.
    Check { file: PathBuf },
    /// Exhaustive search for a small triorthogonal matrix.
    Search {
        #[arg(long = "n")]
        n: usize,
        /// Largest row count searched; defaults to min(n, 8).
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        /// Drop the distance-2 column-coverage requirement.
        #[arg(long)]
        no_d2: bool,
    },
    /// Minimal width of the D block.
    LemmaD {
        #[arg(long, default_value_t = 6)]
        u_max: usize,
    },
    /// Constrained search for the 14-column code.
    #[command(name = "complete-14")]
    Complete14,
}
