//! Flag definitions and literal parsers.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use kedlaya_core::parse::{parse_f64, parse_f64_list, parse_rational_list, split_list};
use kedlaya_core::simple::QRectangle;
use kedlaya_core::{MeanHandle, Rational, WeightClass, WeightVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn mean(s: &str) -> Result<MeanHandle, String> {
    s.parse().map_err(|e: kedlaya_core::Error| e.to_string())
}

#[derive(Clone, Debug)]
pub struct Floats(pub Vec<f64>);

pub fn floats(s: &str) -> Result<Floats, String> {
    parse_f64_list(s).map(Floats).map_err(|e| e.to_string())
}

/// Integer and `p/q` entries stay exact; any decimal entry makes the vector
/// floating point.
pub fn weights(s: &str) -> Result<WeightVector, String> {
    let items = split_list(s);
    let decimal = items.iter().any(|t| t.contains(['.', 'e', 'E']));
    let w = if decimal {
        WeightVector::parse_float(&items, WeightClass::W)
    } else {
        WeightVector::parse_exact(&items, WeightClass::W)
    };
    w.map_err(|e| e.to_string())
}

/// Always exact; decimals are converted to the rational they denote.
pub fn exact_weights(s: &str) -> Result<WeightVector, String> {
    let entries = parse_rational_list(s).map_err(|e| e.to_string())?;
    WeightVector::exact(entries, WeightClass::W).map_err(|e| e.to_string())
}

pub fn rational(s: &str) -> Result<Rational, String> {
    s.trim()
        .parse()
        .map_err(|e: kedlaya_core::Error| e.to_string())
}

/// `a,b,c,d` for the rectangle `[a, b) × [c, d)`.
pub fn host(s: &str) -> Result<QRectangle, String> {
    match parse_rational_list(s).map_err(|e| e.to_string())?[..] {
        [a, b, c, d] => QRectangle::from_bounds(a, b, c, d).map_err(|e| e.to_string()),
        ref v => Err(format!("expected four bounds a,b,c,d, got {}", v.len())),
    }
}

pub fn positive(s: &str) -> Result<f64, String> {
    match parse_f64(s) {
        Ok(v) if v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Mean id, e.g. `power:0`, `gini:0.5:0`, `qa:log`, `gini21`.
    #[arg(long, value_parser = mean)]
    pub mean: MeanHandle,
    /// Entries, comma separated.
    #[arg(long, value_parser = floats, allow_hyphen_values = true)]
    pub x: Floats,
    /// Weights, comma separated; `p/q` literals are kept exact.
    #[arg(long, value_parser = weights)]
    pub w: WeightVector,
    /// Relative verdict tolerance.
    #[arg(long, value_parser = positive, default_value = "1e-9")]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightMode {
    /// All weights equal to one.
    Constant,
    /// Random exact weights in V_n.
    V,
    /// Random integer weights, in V_n or not.
    Integers,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_parser = mean)]
    pub mean: MeanHandle,
    /// Number of entries per trial; ignored with `--w`.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// How each trial draws its weights.
    #[arg(long, value_enum, default_value_t = WeightMode::V, conflicts_with = "w")]
    pub weights: WeightMode,
    /// Use these weights in every trial.
    #[arg(long, value_parser = weights)]
    pub w: Option<WeightVector>,
    /// Largest ratio denominator for `--weights v`.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(1..))]
    pub max_den: i64,
    /// Largest entry for `--weights integers`.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(i64).range(1..))]
    pub max_int: i64,
    #[arg(long, value_parser = positive, default_value = "1e-9")]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct RefuteArgs {
    #[arg(long, value_parser = mean)]
    pub mean: MeanHandle,
    /// Weights outside V_n.
    #[arg(long, value_parser = weights)]
    pub w: WeightVector,
    /// Maximum number of candidate inputs.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Finite-difference step of the derivative probe.
    #[arg(long, value_parser = positive, default_value = "1e-4")]
    pub step: f64,
    /// Treat the reversed inequality as claimed, so that a witness or an
    /// inconsistent probe fails the run.
    #[arg(long)]
    pub assert_reversed: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ConcavityArgs {
    #[arg(long, value_parser = mean)]
    pub mean: MeanHandle,
    /// Number of entries per midpoint test.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = positive, default_value = "1e-9")]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct AxiomsArgs {
    #[arg(long, value_parser = mean)]
    pub mean: MeanHandle,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Largest number of entries per instance.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest acceptable residual.
    #[arg(long, value_parser = positive, default_value = "1e-9")]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ProofFnArgs {
    #[arg(long, value_parser = floats, allow_hyphen_values = true)]
    pub x: Floats,
    /// Exact weights; decimals are read as the rationals they denote.
    #[arg(long, value_parser = exact_weights)]
    pub w: WeightVector,
    /// Step index, 2 ≤ j ≤ n.
    #[arg(long)]
    pub j: usize,
    /// Also compare the function's Jensen–Fubini sides with the step
    /// inequality for this mean.
    #[arg(long, value_parser = mean)]
    pub mean: Option<MeanHandle>,
    /// Absolute tolerance of that comparison.
    #[arg(long, value_parser = positive, default_value = "1e-9")]
    pub tol: f64,
    /// Write `x0 x1 y0 y1 value` rows for gnuplot here.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ProportionalArgs {
    /// Proportion `p/q` in [0, 1].
    #[arg(long, value_parser = rational)]
    pub theta: Rational,
    /// Host rectangle `a,b,c,d` for `[a, b) × [c, d)`.
    #[arg(long, value_parser = host, allow_hyphen_values = true)]
    pub host: QRectangle,
    /// Write `x0 x1 y0 y1` rows for gnuplot here.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}
