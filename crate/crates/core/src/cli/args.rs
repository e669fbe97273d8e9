use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::elimination::{DEFAULT_MAX_ROUNDS, DEFAULT_TOL};
use crate::oracle::{DEFAULT_ELIMINATION_M, DEFAULT_RESPONSE_M};

#[derive(Debug, Parser)]
#[command(
    name = "hotelling",
    version,
    about = "Location choice with waiting costs: shares, best responses and iterated elimination"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Indifference cuts and market shares for a location profile.
    Shares(SharesArgs),
    /// Closed-form best response, optionally checked against a grid search.
    BestResponse(BestResponseArgs),
    /// Best responses sampled over a range of opponent locations.
    ReactionTable(ReactionTableArgs),
    /// Round-by-round surviving sets and their limit.
    Rationalize(RationalizeArgs),
    /// Pure Nash equilibrium check for two firms.
    Nash(NashArgs),
    /// Compare the analytic elimination with the grid oracle and check invariants.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Number of firms; inferred from --a when omitted. A single --a value is repeated.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated inefficiencies, decimals or fractions such as 1/3.
    #[arg(long, value_delimiter = ',', value_parser = parse_number, required = true, allow_hyphen_values = true)]
    pub a: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run grid sweeps on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct SharesArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated firm locations.
    #[arg(long, value_delimiter = ',', value_parser = parse_number, required = true, allow_hyphen_values = true)]
    pub c: Vec<f64>,
    /// Bound on the indifference residual.
    #[arg(long, default_value_t = crate::market::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct BestResponseArgs {
    #[command(flatten)]
    pub common: Common,
    /// Responding firm, counted from 1.
    #[arg(long, default_value_t = 1)]
    pub firm: usize,
    /// Locations of the other firms, in firm order.
    #[arg(long, value_delimiter = ',', value_parser = parse_number, required = true, allow_hyphen_values = true)]
    pub opponents: Vec<f64>,
    /// Also run a grid search and report its distance to the closed form.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = DEFAULT_RESPONSE_M)]
    pub grid_m: usize,
    /// Grid optimality slack in share units; defaults to 0.15 / grid-m.
    #[arg(long, value_parser = parse_number)]
    pub eps_opt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReactionTableArgs {
    #[command(flatten)]
    pub common: Common,
    /// Responding firm, counted from 1 (two firms only).
    #[arg(long, default_value_t = 1)]
    pub firm: usize,
    /// With three firms, hold the left opponent here and sweep the right one.
    /// Without it the table covers the whole (c_l, c_r) grid.
    #[arg(long, value_parser = parse_number)]
    pub c_l: Option<f64>,
    #[arg(long, value_parser = parse_number, default_value = "0")]
    pub from: f64,
    #[arg(long, value_parser = parse_number, default_value = "1")]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct RationalizeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Stop once successive rounds differ by at most this much.
    #[arg(long, value_parser = parse_number, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    pub max_rounds: usize,
}

#[derive(Debug, Args)]
pub struct NashArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of evenly spaced c_1 values scanned (the centre is always added).
    #[arg(long, default_value_t = 10_001)]
    pub scan_n: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_number, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    pub max_rounds: usize,
    #[arg(long, default_value_t = DEFAULT_ELIMINATION_M)]
    pub grid_m: usize,
    /// Grid optimality slack in share units; defaults to 0.15 / grid-m.
    #[arg(long, value_parser = parse_number)]
    pub eps_opt: Option<f64>,
}

/// Decimal literal or fraction `p/q` of decimal literals.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in {s:?}"))?;
            let q: f64 = q
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            p / q
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not a finite number: {s:?}"))
    }
}
