//! Reference search procedures: forward-checking backtracking over the CSP,
//! a minimal DPLL over the CNF encoding, and exhaustive enumeration.

mod dpll;
mod enumerate;
mod fc;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::model::Assignment;

pub use dpll::{decode_model, dpll};
pub use enumerate::{enumerate_solutions, exceeds_enumeration_advisory, ENUMERATION_ADVISORY};
pub use fc::solve_csp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Lowest-index unassigned variable.
    Lex,
    /// Fewest remaining values, ties to the lowest index.
    #[default]
    Mrv,
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "lex" => Ok(Heuristic::Lex),
            "mrv" => Ok(Heuristic::Mrv),
            other => Err(Error::ParamRange(format!(
                "unknown heuristic '{other}' (expected 'lex' or 'mrv')"
            ))),
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heuristic::Lex => "lex",
            Heuristic::Mrv => "mrv",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveConfig {
    /// Stop with [`Status::Limit`] once this many nodes have been expanded.
    pub node_limit: Option<u64>,
    pub heuristic: Heuristic,
    /// Keep searching after the first solution and count all of them.
    pub count_all: bool,
}

impl SolveConfig {
    pub fn with_limit(node_limit: u64) -> Self {
        SolveConfig {
            node_limit: Some(node_limit.max(1)),
            ..Default::default()
        }
    }

    pub fn counting() -> Self {
        SolveConfig {
            count_all: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Limit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Limit => "LIMIT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// First solution found; present iff `status == Sat`. For [`dpll`] the
    /// values are 0/1 per propositional variable.
    pub witness: Option<Assignment>,
    /// Value assignments attempted (CSP) or branches taken (DPLL).
    pub nodes: u64,
    /// Assignments retracted.
    pub backtracks: u64,
    /// Number of solutions, when counting was requested and completed.
    pub solutions: Option<u64>,
}

pub(crate) enum Flow {
    Continue,
    Stop,
    Limit,
}
