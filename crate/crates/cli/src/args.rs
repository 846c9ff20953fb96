use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "diffract", version, about = "Aperiodic point sets and their diffraction")]
pub struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = "DIFFRACT_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Base name of the output files.
    #[arg(long, global = true)]
    pub name: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Write a finite patch of a point set.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Evaluate a closed-form diffraction spectrum.
    #[command(subcommand)]
    Analytic(AnalyticCmd),
    /// Periodogram estimates from patches.
    #[command(subcommand)]
    Estimate(EstimateCmd),
    /// Compare an estimate with a reference spectrum.
    Compare(CompareArgs),
    /// Re-run a manifest and check that every output is reproduced.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct CrystalArgs {
    /// Basis rows, e.g. "1,0;0,1"; column j is the j-th generator.
    #[arg(long, default_value = "1,0;0,1")]
    pub basis: String,
    /// Motif site "f1,f2,...=re[,im]" in fractional coordinates; repeatable.
    #[arg(long = "site", default_values_t = vec!["0,0=1".to_string(), "0.5,0.5=1".to_string()])]
    pub sites: Vec<String>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerateCmd {
    /// Lattice patch with a weighted motif inside a ball.
    Crystal {
        #[command(flatten)]
        crystal: CrystalArgs,
        #[arg(long)]
        radius: f64,
    },
    /// Fibonacci model set with exact ℤ[τ] positions.
    Fibonacci {
        /// Physical-space range "LO HI".
        #[arg(long, num_args = 2, allow_negative_numbers = true, required = true)]
        range: Vec<f64>,
    },
    /// Thue–Morse ±1 word of length 2^n.
    Tm {
        #[arg(long)]
        n: u32,
    },
    /// Rudin–Shapiro ±1 sequence over an index range.
    Rs {
        /// Inclusive index range "LO HI".
        #[arg(long, num_args = 2, allow_negative_numbers = true, required = true)]
        range: Vec<i64>,
    },
    /// Independent signs, +1 with probability p.
    Bernoulli {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Number of points, placed at 0..n.
        #[arg(long)]
        n: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Rudin–Shapiro signs times independent signs that are +1 with probability p.
    RsBernoulli {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Random tiling by long and short tiles.
    RandomFibonacci {
        /// Probability of a long tile; defaults to 1/τ.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticCmd {
    /// Bragg peaks of the Fibonacci model set.
    Fibonacci {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        kmin: f64,
        #[arg(long, default_value_t = 20.0)]
        kmax: f64,
        /// Keep peaks with at least this fraction of the central intensity.
        #[arg(long, default_value_t = 0.001)]
        threshold_frac: f64,
    },
    /// Bragg peaks of a lattice crystal.
    Crystal {
        #[command(flatten)]
        crystal: CrystalArgs,
        #[arg(long, default_value_t = 10.0)]
        kmax: f64,
    },
    /// Partial Riesz product density of the Thue–Morse measure.
    TmRiesz {
        #[arg(long = "N", default_value_t = 16)]
        depth: u32,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        kmin: f64,
        #[arg(long, default_value_t = 1.0)]
        kmax: f64,
        #[arg(long, default_value_t = 4097)]
        points: usize,
    },
    /// Distribution function of the Thue–Morse measure.
    TmDistribution {
        #[arg(long = "N", default_value_t = 16)]
        depth: u32,
        #[arg(long, default_value_t = 4097)]
        gridsize: usize,
        #[arg(long, default_value_t = 1 << 14)]
        fourier_terms: usize,
        #[arg(long, default_value_t = 20)]
        word_exponent: u32,
        #[arg(long, default_value_t = 1e-3)]
        tolerance: f64,
    },
    /// Lebesgue density shared by Rudin–Shapiro and Bernoulli systems.
    Rs {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        kmin: f64,
        #[arg(long, default_value_t = 1.0)]
        kmax: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Diffuse density of the random Fibonacci tiling.
    RandomFibonacci {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        kmin: f64,
        #[arg(long, default_value_t = 20.0)]
        kmax: f64,
        #[arg(long, default_value_t = 2000)]
        cells: usize,
        #[arg(long, default_value_t = 1)]
        oversample: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// |S|²/vol.
    Ac,
    /// (|S|/vol)².
    Bragg,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub kmin: f64,
    #[arg(long, default_value_t = 1.0)]
    pub kmax: f64,
    #[arg(long, default_value_t = 32)]
    pub cells: usize,
    #[arg(long, default_value_t = 1)]
    pub oversample: usize,
    /// Explicit wavenumbers (comma separated) instead of a cell grid.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleSystem {
    Bernoulli,
    Rs,
    RsBernoulli,
    RandomFibonacci,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateCmd {
    /// Periodogram of a comb file written by `generate`.
    Periodogram {
        /// Comb CSV; its manifest must sit next to it.
        #[arg(long)]
        comb: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Ac)]
        mode: Mode,
        /// Evaluate at the `k` column of a spectrum or estimate table.
        #[arg(long, conflicts_with = "at")]
        at_file: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Mean periodogram over seeded realizations.
    Ensemble {
        #[arg(value_enum)]
        system: EnsembleSystem,
        /// Sign probability (default ½) or long-tile probability (default 1/τ).
        #[arg(long)]
        p: Option<f64>,
        /// Points per realization (tiles for random-fibonacci).
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 100)]
        realizations: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Ac)]
        mode: Mode,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    L1rel,
    Maxrel,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// Estimate CSV (`k,value`).
    #[arg(long)]
    pub estimate: PathBuf,
    /// Reference CSV: `k,intensity` peaks, or `k,density` / `k,value`.
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::L1rel)]
    pub metric: MetricArg,
    #[arg(long, default_value_t = f64::NEG_INFINITY, allow_negative_numbers = true)]
    pub kmin: f64,
    #[arg(long, default_value_t = f64::INFINITY, allow_negative_numbers = true)]
    pub kmax: f64,
    /// Excluded interval "LO:HI"; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub exclude: Vec<String>,
    /// Exit with status 1 when the metric exceeds this value.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
