//! `rbcsp`: generate Model RB/RD instances, evaluate their closed-form
//! statistics, and run phase-transition experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rbcsp::{Heuristic, ModelKind};

#[derive(Debug, Parser)]
#[command(
    name = "rbcsp",
    version,
    about = "Model RB/RD random CSP benchmarks and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Rb,
    Rd,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Rb => ModelKind::Rb,
            ModelArg::Rd => ModelKind::Rd,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Lex,
    Mrv,
}

impl From<HeuristicArg> for Heuristic {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::Lex => Heuristic::Lex,
            HeuristicArg::Mrv => Heuristic::Mrv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Rbcsp,
    Dimacs,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    P,
    R,
}

/// Full model parameters.
#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, value_enum, default_value = "rb")]
    model: ModelArg,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    p: f64,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "mrv")]
    heuristic: HeuristicArg,
    #[arg(long, default_value_t = rbcsp::harness::DEFAULT_NODE_LIMIT)]
    node_limit: u64,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate instances as RBCSP and/or DIMACS files.
    Gen {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        seed: u64,
        /// Plant a hidden satisfying assignment.
        #[arg(long)]
        forced: bool,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value = "rbcsp")]
        format: FormatArg,
        /// Write files here; without it a single instance goes to stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Also write `<name>.solution` with the hidden assignment.
        #[arg(long)]
        emit_solution: bool,
        /// Split domain clauses wider than this (>= 3) in DIMACS output.
        #[arg(long)]
        split_width: Option<usize>,
    },
    /// Thresholds, side conditions and log-moments as key=value lines.
    #[command(alias = "analyze")]
    Thresholds {
        #[arg(long, value_enum, default_value = "rb")]
        model: ModelArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        /// Also report sizes and moments at this number of variables.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Distance-profile CSV: S,d_t,log_expected_random,log_expected_forced.
    Profile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode an RBCSP file as DIMACS CNF.
    Encode {
        input: PathBuf,
        #[arg(long)]
        split_width: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an RBCSP (forward checking) or DIMACS (DPLL) file.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "mrv")]
        heuristic: HeuristicArg,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long)]
        count_all: bool,
        #[arg(long)]
        no_witness: bool,
    },
    /// SAT fraction and search cost across a p or r grid (CSV).
    Sweep {
        #[arg(long, value_enum, default_value = "rb")]
        model: ModelArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        /// Fixed density (required for --axis p).
        #[arg(long)]
        r: Option<f64>,
        /// Fixed tightness (required for --axis r).
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_enum, default_value = "p")]
        axis: AxisArg,
        /// Explicit comma-separated grid.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        forced: bool,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Median search cost of forced instances as n grows (CSV).
    Scale {
        #[arg(long, value_enum, default_value = "rb")]
        model: ModelArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n_values: Vec<usize>,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        r: f64,
        /// Tightness; defaults to the critical value for (alpha, r).
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare search cost of forced and random satisfiable instances.
    CompareForced {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Cap on random instances generated while collecting SAT ones.
        #[arg(long)]
        max_draws: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Run the oracle-equivalence and moment Monte-Carlo suites.
    Validate {
        #[arg(long, default_value_t = 500)]
        instances: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(commands::CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
