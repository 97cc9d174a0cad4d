use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "dimlab",
    version,
    about = "Exact and estimated dimensions of measures on the line, and convergence checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact dimension table of a measure.
    Exact(ExactArgs),
    /// Numeric dimension estimate from a scaling series.
    Estimate(EstimateArgs),
    /// Total variation distance between two measure documents.
    Tv(TvArgs),
    /// Convergence check of an example sequence in one topology.
    Converge(ConvergeArgs),
    /// Verify the worked examples against their expected values.
    Verify(VerifyArgs),
}

/// A measure from a document, or a term or limit of an example sequence.
#[derive(Debug, Clone, Args, Serialize)]
pub struct MeasureSource {
    /// Measure document (JSON).
    #[arg(long, conflicts_with = "example", required_unless_present = "example")]
    pub measure: Option<PathBuf>,
    /// Example sequence name (ex1, ex3, ex4, ex5, ex6, ex7, ex8).
    #[arg(long)]
    pub example: Option<String>,
    /// Term index; the limit is used when absent.
    #[arg(long, requires = "example")]
    pub n: Option<u64>,
    #[command(flatten)]
    pub params: ExampleParams,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExampleParams {
    /// Block ratio of ex7.
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    /// Contraction ratios of ex3, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0 / 3.0, 1.0 / 3.0])]
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Directory for CSV/JSON files; nothing is written when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExactArgs {
    #[command(flatten)]
    pub source: MeasureSource,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Box counting with the δ-cover (whole schedule fitted).
    Box,
    /// Quantiles of the local dimension.
    Local,
    /// Grassberger–Procaccia correlation sums.
    Gp,
    /// Correlation sums with the heaviest δ-fraction of samples removed.
    Mc,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub source: MeasureSource,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub rmin: f64,
    #[arg(long, default_value_t = 1e-1)]
    pub rmax: f64,
    #[arg(long, default_value_t = 24)]
    pub rsteps: usize,
    /// Cover defect for `box` (default 0) or discarded fraction for `mc` (default 0.05).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Fit window; defaults to the schedule without its largest and smallest quarter.
    #[arg(long, requires = "window_max")]
    pub window_min: Option<f64>,
    #[arg(long, requires = "window_min")]
    pub window_max: Option<f64>,
    /// Local-dimension quantiles for `local`.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.5, 0.99])]
    pub quantiles: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TvArgs {
    /// First measure document.
    #[arg(long = "a")]
    pub first: PathBuf,
    /// Second measure document.
    #[arg(long = "b")]
    pub second: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Weak,
    Setwise,
    Tv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub example: String,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 50)]
    pub horizon: u64,
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    #[command(flatten)]
    pub params: ExampleParams,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Examples to verify.
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    pub names: Vec<String>,
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = 50)]
    pub horizon: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Tolerance for the convergence checkers.
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Allowed deviation of numeric slopes.
    #[arg(long, default_value_t = 0.05)]
    pub numeric: f64,
    #[command(flatten)]
    pub params: ExampleParams,
    #[command(flatten)]
    pub output: OutputArgs,
}
