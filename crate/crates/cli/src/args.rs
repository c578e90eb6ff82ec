use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "landscape", version, about = "Controller landscapes of spin-ring transfer and their error/log-sensitivity trends")]
pub struct Cli {
    /// Worker threads (default: LANDSCAPE_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Optimise controllers for one transfer and archive the study.
    Generate(GenerateArgs),
    /// Kendall tau and Jonckheere-Terpstra tests on archived studies.
    Test(TestArgs),
    /// Power of the right-tailed test against shifted alternatives.
    Power(PowerArgs),
    /// Combine per-study trend tests.
    Meta(MetaArgs),
    /// Convert an external table into a study archive.
    Import(ImportArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub spins: usize,
    /// Target spin; the source is always spin 1.
    #[arg(long)]
    pub out: usize,
    #[arg(long, default_value_t = 2000)]
    pub tasks: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub cutoff: f64,
    /// `inst` or `window:<width>`.
    #[arg(long, default_value = "inst")]
    pub objective: String,
    /// Bias box `lo:hi`.
    #[arg(long, default_value = "0:10")]
    pub d_bounds: String,
    /// Readout-time box `lo:hi` (default 0:5M).
    #[arg(long)]
    pub t_bounds: Option<String>,
    /// `xx` or `heisenberg`.
    #[arg(long, default_value = "xx")]
    pub coupling: String,
    /// Comma-separated couplings J_12..J_M1 (default all 1).
    #[arg(long, value_delimiter = ',')]
    pub couplings: Option<Vec<f64>>,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub gradient_tolerance: f64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TestArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "3,10,100")]
    pub bins: Vec<usize>,
    #[arg(long, default_value = "right")]
    pub tail: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// `plain`, `spacing` or `rank`.
    #[arg(long, default_value = "plain")]
    pub variant: String,
    /// Permutations for the weighted variants' null moments.
    #[arg(long, default_value_t = 10_000)]
    pub shuffles: usize,
    #[arg(long, default_value_t = 0)]
    pub perm_seed: u64,
    /// Bins for the ECDF and rank von Neumann diagnostics.
    #[arg(long, default_value_t = 10)]
    pub diagnostic_bins: usize,
    /// Output prefix: writes PREFIX.txt, PREFIX.csv and one plot CSV per study.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PowerArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1,0.5")]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 5.0)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Power level whose crossing is reported.
    #[arg(long, default_value_t = 0.8)]
    pub target: f64,
    /// Grid CSV; crossings go to the same stem with `.crossings.csv`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MetaArgs {
    /// Archive paths or glob patterns.
    #[arg(long, required = true, num_args = 1..)]
    pub inputs: Vec<String>,
    /// `stouffer`, `liptak`, `fisher` or `sector`.
    #[arg(long, default_value = "stouffer")]
    pub method: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bins of the per-study JT test.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[arg(long, default_value = "right")]
    pub tail: String,
    /// Sector assignment: `published` or `angular`.
    #[arg(long, default_value = "published")]
    pub rule: String,
    /// Output prefix: writes PREFIX.txt and PREFIX.csv.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ImportArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub error_column: String,
    #[arg(long)]
    pub logsens_column: String,
    #[arg(long)]
    pub spins: usize,
    #[arg(long)]
    pub out: usize,
    #[arg(long, default_value = "xx")]
    pub coupling: String,
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}
