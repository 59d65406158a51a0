use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use midsift::{Boundary, Strategy};

#[derive(Debug, Parser)]
#[command(name = "midsift", version, about = "Empirical mode decomposition with midpoint sifting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a preset or generated signal to signal.csv.
    Generate(CommonArgs),
    /// Decompose into IMF CSVs plus a JSON summary.
    Decompose(CommonArgs),
    /// Run classical and midpoint sifting side by side on one input.
    Compare(CompareArgs),
    /// Periodogram, peaks and an optional spectral-slope fit.
    Spectrum(SpectrumArgs),
    /// Delay-embedded PCA: eigenvalue spectrum and optional grouping.
    Pca(PcaArgs),
    /// Detrend, remove wave IMFs and fit the residual spectral slope.
    Atmospheric(AtmosphericArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Classical,
    Midpoint,
    Hybrid,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Classical => Strategy::Classical,
            StrategyArg::Midpoint => Strategy::Midpoint,
            StrategyArg::Hybrid => Strategy::Hybrid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Mirror,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Mirror => Boundary::Mirror,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

/// Flags shared by every subcommand. Each one overrides the matching field
/// of the `--config` file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Built-in signal: eq2.1, eq3.1, case1, case2, case3, sounding.
    #[arg(long, value_name = "NAME", conflicts_with = "input")]
    pub preset: Option<String>,

    /// Two-column time,value CSV.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Sifting curve used for decomposition
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,

    /// Stopping tolerance, relative to the norm of each extraction's input
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Sifting iteration cap per IMF.
    #[arg(long = "max-iter", value_name = "N")]
    pub max_iter: Option<usize>,

    /// End treatment for envelope knots
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,

    /// Seed for noise and stochastic presets
    #[arg(long)]
    pub seed: Option<u64>,

    /// Run independent strategies and matrix rows on the thread pool.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Report a single sifting pass per strategy instead of full decompositions.
    #[arg(long)]
    pub single_sift: bool,

    /// Also run the hybrid strategy.
    #[arg(long)]
    pub hybrid: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Fit a log-log slope over this angular-frequency band.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub band: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct PcaArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Delay between embedded copies, in samples. Chosen automatically if absent.
    #[arg(long)]
    pub delta: Option<usize>,

    /// Number of delayed copies.
    #[arg(long)]
    pub dim: Option<usize>,

    /// Last mean-flow component (0-based).
    #[arg(long, requires = "m2")]
    pub m1: Option<usize>,

    /// Last wave component (0-based).
    #[arg(long, requires = "m1")]
    pub m2: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct AtmosphericArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Inertial band for the slope fit.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub band: Option<Vec<f64>>,

    /// 1-based indices of the IMFs to remove as waves, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub wave_imfs: Option<Vec<usize>>,
}
