//! `exchange-lab`: analyze exchange economies, verify equilibria and run
//! allocation procedures from JSON documents.
//!
//! Exit codes: 0 success, 1 a verdict is false under `--strict`, 2 input
//! error, 3 local search stopped at the move cap.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exchange_lab::generate::EconomyClass;
use exchange_lab::tolerance::TOL_ENV_VAR;

#[derive(Parser, Debug)]
#[command(
    name = "exchange-lab",
    version,
    about = "Local equilibria in exchange economies with indivisible items"
)]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report format. CSV flattens nested reports to `path,value` rows.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Comparison tolerance ε; overrides the EXCHANGE_LAB_TOL variable.
    #[arg(long, global = true, value_name = "F")]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Submodularity indices, integral and fractional optimum, dual prices.
    Analyze(AnalyzeArgs),
    /// Quality and equilibrium verdicts of an allocation at given prices.
    Verify(VerifyArgs),
    /// Run an allocation or pricing procedure.
    Run(RunArgs),
    /// Write the built-in example economies with their allocations and prices.
    Examples(ExamplesArgs),
    /// Analyze a batch of random economies; one row per economy.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long, value_name = "PATH")]
    pub economy: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_name = "PATH")]
    pub economy: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub allocation: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub prices: PathBuf,
    /// Individual-rationality level of the local check.
    #[arg(long, default_value_t = 1.0, value_name = "F")]
    pub r: f64,
    /// Outward-stability level of the local check.
    #[arg(long, default_value_t = 1.0, value_name = "F")]
    pub s: f64,
    /// Also check strong individual rationality at this multiplier.
    #[arg(long, value_name = "C")]
    pub strong: Option<f64>,
    /// Also check the Walrasian conditions.
    #[arg(long)]
    pub walrasian: bool,
    /// Also check the single-swap and single-improvement conditions.
    #[arg(long)]
    pub swap: bool,
    /// Also report the quasi-Walrasian quality.
    #[arg(long)]
    pub quasi: bool,
    /// Enable every optional check (strong IR at c = 1).
    #[arg(long)]
    pub all: bool,
    /// Exit with status 1 when any verdict is false.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Procedure {
    Greedy,
    LocalSearch,
    Optimal,
    SupportingPrices,
    MaxQ,
    MaxQuasiQ,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    First,
    Best,
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Free,
    Uniform,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(value_enum)]
    pub procedure: Procedure,
    #[arg(long, value_name = "PATH")]
    pub economy: PathBuf,
    /// Starting allocation (local-search) or fixed allocation (supporting-prices, max-q, max-quasi-q).
    #[arg(long, value_name = "PATH")]
    pub allocation: Option<PathBuf>,
    /// Greedy item order as comma-separated item names.
    #[arg(long, value_name = "CSV")]
    pub order: Option<String>,
    /// Position of each price inside its competitive band, in [0, 1].
    #[arg(long, default_value_t = 0.0, value_name = "F")]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = Policy::Best)]
    pub policy: Policy,
    #[arg(long, default_value_t = 0, value_name = "N")]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000, value_name = "N")]
    pub move_cap: usize,
    /// Price shape for max-q.
    #[arg(long, value_enum, default_value_t = Shape::Free)]
    pub shape: Shape,
    /// Append the quality report of the resulting allocation and prices.
    #[arg(long)]
    pub verify: bool,
    /// With --verify, exit with status 1 unless the result is a (1,1)-local equilibrium.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct ExamplesArgs {
    /// Example name, or `all`.
    #[arg(default_value = "all")]
    pub name: String,
    /// Complementarity parameter of ex-asubmod.
    #[arg(long, value_name = "F")]
    pub a: Option<f64>,
    /// Small value of ex-smallq.
    #[arg(long, value_name = "F")]
    pub eps: Option<f64>,
    /// Directory receiving `<name>.economy.json`, `.allocation.json`, `.prices.json`.
    #[arg(long, default_value = ".", value_name = "DIR")]
    pub dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Valuation classes, comma separated; all four by default.
    #[arg(long, value_delimiter = ',')]
    pub class: Vec<EconomyClass>,
    #[arg(long, default_value_t = 4, value_name = "N")]
    pub items: usize,
    #[arg(long, default_value_t = 3, value_name = "N")]
    pub agents: usize,
    /// Economies per class.
    #[arg(long, default_value_t = 10, value_name = "N")]
    pub count: usize,
    /// Base seed; economy `k` of class `c` uses `seed + 1000·c + k`.
    #[arg(long, default_value_t = 0, value_name = "N")]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            eprintln!("error: --tol must be a positive finite number, got {t}");
            return ExitCode::from(commands::EXIT_INPUT);
        }
        // read once by the library on first use, which has not happened yet
        std::env::set_var(TOL_ENV_VAR, t.to_string());
    }
    let echo: Vec<String> = std::env::args().skip(1).collect();
    match commands::execute(&cli, echo) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(commands::EXIT_INPUT)
        }
    }
}
