//! CNF encoding and file formats.

mod cnf;
mod dimacs;
mod native;

pub use cnf::{encode_cnf, var_index, CnfFormula};
pub use dimacs::{read_dimacs, write_dimacs};
pub use native::{read_csp_native, read_solution, write_csp_native, write_solution};

/// Reals in every text format: 17 significant digits in scientific form,
/// which round-trips any `f64` exactly.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}
