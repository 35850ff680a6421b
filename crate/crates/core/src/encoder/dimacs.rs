use std::fmt::Write;

use crate::error::{Error, Result};

use super::CnfFormula;

/// DIMACS text: `c key=value` comment lines, the `p cnf V C` header, then
/// one clause per line terminated by `0`. Lines end with `\n`.
pub fn write_dimacs(cnf: &CnfFormula) -> String {
    let mut out = String::new();
    for (k, v) in &cnf.metadata {
        let _ = writeln!(out, "c {k}={v}");
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    for clause in &cnf.clauses {
        for lit in clause {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF. Clauses may span lines; `c key=value` comments are
/// kept as metadata, other comments are skipped. A trailing `%` line (as
/// in SATLIB files) ends the input.
pub fn read_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut metadata = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('c') {
            if comment.is_empty() || comment.starts_with(char::is_whitespace) {
                if let Some((k, v)) = comment.trim().split_once('=') {
                    if !k.is_empty() && !k.contains(char::is_whitespace) {
                        metadata.push((k.to_string(), v.to_string()));
                    }
                }
                continue;
            }
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "duplicate header".into(),
                });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("malformed header '{line}'"),
                });
            }
            let num = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad header count '{s}'"),
                })
            };
            header = Some((num(parts[2])?, num(parts[3])?));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::Parse {
                line: line_no,
                msg: "clause before header".into(),
            });
        };
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad literal '{tok}'"),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > num_vars {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("literal {lit} exceeds declared {num_vars} variables"),
                });
            } else {
                current.push(lit);
            }
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(Error::Parse {
            line: 0,
            msg: "missing 'p cnf' header".into(),
        });
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != num_clauses {
        return Err(Error::Consistency(format!(
            "header declares {num_clauses} clauses, found {}",
            clauses.len()
        )));
    }
    Ok(CnfFormula {
        num_vars,
        clauses,
        metadata,
    })
}
