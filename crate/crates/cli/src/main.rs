//! `caputo`: Caputo derivative expansions, FDE solves, convergence sweeps and
//! scheme comparisons, written as CSV or plain-text tables.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numeric failure,
//! 4 solver failure.

mod commands;
mod config;
mod csv;
mod error;
mod function;

use std::path::PathBuf;
use std::process::ExitCode;

use caputo_core::Side;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "caputo", version, about = "Caputo fractional derivatives via integer-order expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand the Caputo derivative of an expression on a grid.
    Deriv(DerivArgs),
    /// Solve a Caputo FDE as an ODE system.
    Solve(SolveArgs),
    /// Error against N or m, with a fitted log-log slope.
    Convergence(ConvergenceArgs),
    /// Expansion next to the Sousa finite-difference scheme.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    #[value(name = "N")]
    N,
    #[value(name = "m")]
    M,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct DerivArgs {
    /// Function of t, e.g. "t^6" or "sin(2*t)".
    #[arg(long)]
    expr: String,
    /// Order alpha > 0, not an integer.
    #[arg(long)]
    alpha: f64,
    /// Left end of the interval.
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    /// Right end of the interval.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Left (anchored at a) or right (anchored at b) derivative.
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
    /// Expansion depth.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Truncation, at least m + 1.
    #[arg(long = "N", default_value_t = 50)]
    n_terms: u32,
    /// Number of uniform grid points including both ends.
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Adds the closed-form column for (t-a)^(beta-1), or (b-t)^(beta-1) on the right.
    #[arg(long)]
    exact_beta: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Problem definition shared by `solve` and `convergence`. Flags override
/// values read from `--config`.
#[derive(Debug, Args)]
struct ProblemArgs {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Order alpha > 0, not an integer.
    #[arg(long)]
    alpha: Option<f64>,
    /// Start of the interval, where initial conditions hold.
    #[arg(long)]
    a: Option<f64>,
    /// End of the interval.
    #[arg(long)]
    b: Option<f64>,
    /// Coefficient of the Caputo term.
    #[arg(long)]
    frac_coeff: Option<f64>,
    /// Coefficients of x, x', ... below order n, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
    /// Extra coefficient on x' (needs n >= 2).
    #[arg(long)]
    damping: Option<f64>,
    /// Right-hand side f(t).
    #[arg(long)]
    forcing: Option<String>,
    /// Initial values x(a), x'(a), ..., comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ic: Option<Vec<f64>>,
    /// Expansion depth; values above 0 need extra initial conditions (experimental).
    #[arg(long)]
    m: Option<u32>,
    /// Truncation N.
    #[arg(long = "N")]
    n_terms: Option<u32>,
    /// Absolute integrator tolerance.
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Relative integrator tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Offset of the first integration point from a; default 1e-6 (b - a).
    #[arg(long)]
    epsilon_start: Option<f64>,
    /// Number of uniform output points including both ends.
    #[arg(long)]
    grid: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Exact solution; its L2 grid distance is printed to stderr.
    #[arg(long)]
    reference: Option<String>,
    /// Also write x', x'', ... up to the state dimension.
    #[arg(long)]
    derivatives: bool,
    /// Print the resolved configuration and exit without solving.
    #[arg(long)]
    print_config: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ConvergenceArgs {
    /// Parameter to sweep.
    #[arg(long, value_enum)]
    sweep: SweepParam,
    /// Values to sweep over, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<u32>,
    /// Sweep a derivative of this expression instead of an FDE problem.
    #[arg(long)]
    expr: Option<String>,
    /// Side for --expr sweeps.
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
    /// Closed-form reference for --expr sweeps; direct quadrature otherwise.
    #[arg(long)]
    exact_beta: Option<f64>,
    #[command(flatten)]
    problem: ProblemArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct CompareArgs {
    /// Function of t.
    #[arg(long)]
    expr: String,
    /// Order in (1, 2).
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Uniform step; (b - a)/dt must be an integer.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long = "N", default_value_t = 50)]
    n_terms: u32,
    /// Adds the closed-form column for (t-a)^(beta-1).
    #[arg(long)]
    exact_beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Deriv(args) => commands::deriv::run(args),
        Command::Solve(args) => commands::solve::run(args),
        Command::Convergence(args) => commands::convergence::run(args),
        Command::Compare(args) => commands::compare::run(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("caputo: {e}");
            e.exit_code()
        }
    }
}
