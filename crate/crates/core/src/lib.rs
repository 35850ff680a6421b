//! Random constraint satisfaction instances of Model RB and Model RD.
//!
//! * [`model`]: parameters, derived sizes, instances, assignments.
//! * [`generator`]: seeded random and forced-satisfiable generation.
//! * [`analysis`]: thresholds, moments, distance profiles, flawed-tuple
//!   probabilities.
//! * [`encoder`]: direct CNF encoding, DIMACS and RBCSP text formats.
//! * [`solver`]: forward checking, DPLL, exhaustive enumeration.
//! * [`harness`]: tightness/density sweeps, scaling studies and the
//!   forced-vs-random comparison.
//! * [`validate`]: oracle-equivalence and Monte-Carlo moment suites.

pub mod analysis;
pub mod encoder;
pub mod error;
pub mod exec;
pub mod generator;
pub mod harness;
pub mod model;
pub mod rng;
pub mod solver;
pub mod validate;

pub use error::{Error, Result};
pub use exec::Exec;
pub use generator::{generate, GenRequest};
pub use model::{Assignment, Constraint, CspInstance, CspParams, DerivedSizes, ModelKind};
pub use rng::derive_stream;
pub use solver::{Heuristic, SolveConfig, SolveResult, Status};
