use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ssal_core::problems::PortfolioParams;
use ssal_core::ssal::SolverParams;

#[derive(Debug, Parser)]
#[command(name = "ssal", version, about = "Sparse semicontinuous optimization by splitting augmented Lagrangian")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded instance as JSON.
    Gen(GenArgs),
    /// Solve an instance and report.
    Solve(SolveArgs),
    /// Solve a small instance exactly by support enumeration.
    Oracle(OracleArgs),
    /// Cross-check the closed-form projection and the solver against the oracle.
    Check(CheckArgs),
    /// Solve a range of seeded instances and summarize.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Portfolio,
    Cs,
}

#[derive(Debug, Clone, Args)]
pub struct SolverOverrides {
    #[arg(long)]
    pub rho: Option<f64>,
    /// Defaults to 0.3 for quadratic forms and 1.0 for least squares.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "max-outer")]
    pub max_outer: Option<usize>,
}

impl SolverOverrides {
    pub fn apply(&self, mut params: SolverParams) -> SolverParams {
        if let Some(v) = self.rho {
            params.rho = v;
        }
        if let Some(v) = self.omega {
            params.omega = v;
        }
        if let Some(v) = self.epsilon {
            params.epsilon = v;
        }
        if let Some(v) = self.max_outer {
            params.max_outer = v;
        }
        params
    }
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    #[arg(long, value_enum, default_value = "cs")]
    pub family: Family,
    /// Number of variables.
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    /// Measurements (sensing family).
    #[arg(long, default_value_t = 8)]
    pub p: usize,
    /// Factors (portfolio family).
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[arg(long = "K", default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0.01)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Add the nonsystematic risk cap (portfolio family).
    #[arg(long = "with-risk")]
    pub with_risk: bool,
}

impl GeneratorArgs {
    pub fn portfolio_params(&self) -> PortfolioParams {
        PortfolioParams {
            k: self.k,
            with_risk: self.with_risk,
            ..PortfolioParams::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// JSON report file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV file the result row is appended to.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverOverrides,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Measurements of the sensing instances; two thirds of n when absent.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long = "K", default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0.01)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub repeat: u64,
    #[command(flatten)]
    pub solver: SolverOverrides,
    /// Perturb the closed-form objective to exercise the failure path.
    #[arg(long = "inject-mismatch", hide = true)]
    pub inject_mismatch: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 10)]
    pub repeat: u64,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// CSV output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverOverrides,
}
