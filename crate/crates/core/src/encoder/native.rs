//! The RBCSP v1 instance format and the hidden-assignment sidecar.
//!
//! ```text
//! RBCSP 1
//! params <model> <k> <n> <alpha> <r> <p> <seed>
//! sizes <d> <m>
//! c <u_1> ... <u_k>        one per constraint, 1-indexed variables
//! t <v_1> ... <v_k>        its incompatible tuples, 1-indexed values,
//!                          ascending rank order
//! ```
//!
//! Reals are written with 17 significant digits. The hidden assignment of
//! a forced instance is never part of this file; it goes to a separate
//! sidecar of `u v` lines.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{
    derive_sizes, tuple_rank, Assignment, Constraint, CspInstance, CspParams, ModelKind,
};

use super::fmt_real;

pub fn write_csp_native(instance: &CspInstance) -> String {
    let p = instance.params();
    let s = instance.sizes();
    let d = instance.d();
    let mut out = String::from("RBCSP 1\n");
    let _ = writeln!(
        out,
        "params {} {} {} {} {} {} {}",
        p.model,
        p.k,
        p.n,
        fmt_real(p.alpha),
        fmt_real(p.r),
        fmt_real(p.p),
        instance.seed()
    );
    let _ = writeln!(out, "sizes {} {}", s.d, s.m);
    for c in instance.constraints() {
        out.push('c');
        for &u in c.scope() {
            let _ = write!(out, " {}", u + 1);
        }
        out.push('\n');
        for tuple in c.incompatible_tuples(d) {
            out.push('t');
            for v in tuple {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
        }
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} '{tok}'")))
}

fn one_indexed(line: usize, tok: &str, bound: usize, what: &str) -> Result<usize> {
    let x: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what} '{tok}'")))?;
    if x == 0 || x > bound {
        return Err(parse_err(line, format!("{what} {x} outside 1..={bound}")));
    }
    Ok(x - 1)
}

pub fn read_csp_native(text: &str) -> Result<CspInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    if header != "RBCSP 1" {
        return Err(parse_err(ln, format!("expected 'RBCSP 1', got '{header}'")));
    }

    let (ln, line) = lines
        .next()
        .ok_or_else(|| parse_err(ln + 1, "missing params line"))?;
    let mut toks = line.split_whitespace();
    if toks.next() != Some("params") {
        return Err(parse_err(ln, "expected 'params' line"));
    }
    let model: ModelKind = field(ln, toks.next(), "model")?;
    let k: usize = field(ln, toks.next(), "k")?;
    let n: usize = field(ln, toks.next(), "n")?;
    let alpha: f64 = field(ln, toks.next(), "alpha")?;
    let r: f64 = field(ln, toks.next(), "r")?;
    let p: f64 = field(ln, toks.next(), "p")?;
    let seed: u64 = field(ln, toks.next(), "seed")?;
    if toks.next().is_some() {
        return Err(parse_err(ln, "trailing fields on params line"));
    }
    let params =
        CspParams::new(model, k, n, alpha, r, p).map_err(|e| parse_err(ln, e.to_string()))?;
    let sizes = derive_sizes(&params).map_err(|e| parse_err(ln, e.to_string()))?;

    let (ln, line) = lines
        .next()
        .ok_or_else(|| parse_err(ln + 1, "missing sizes line"))?;
    let mut toks = line.split_whitespace();
    if toks.next() != Some("sizes") {
        return Err(parse_err(ln, "expected 'sizes' line"));
    }
    let d: usize = field(ln, toks.next(), "d")?;
    let m: usize = field(ln, toks.next(), "m")?;
    if toks.next().is_some() {
        return Err(parse_err(ln, "trailing fields on sizes line"));
    }
    if d != sizes.d || m != sizes.m {
        return Err(Error::Consistency(format!(
            "declared sizes d={d}, m={m} disagree with params (d={}, m={})",
            sizes.d, sizes.m
        )));
    }

    let mut pending: Vec<(Vec<usize>, Vec<u64>)> = Vec::with_capacity(m);
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        let tag = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();
        if rest.len() != k {
            return Err(parse_err(
                ln,
                format!("expected {k} entries, got {}", rest.len()),
            ));
        }
        match tag {
            "c" => {
                let scope = rest
                    .iter()
                    .map(|t| one_indexed(ln, t, n, "variable"))
                    .collect::<Result<Vec<_>>>()?;
                pending.push((scope, Vec::new()));
            }
            "t" => {
                let values = rest
                    .iter()
                    .map(|t| one_indexed(ln, t, d, "value"))
                    .collect::<Result<Vec<_>>>()?;
                let (_, ranks) = pending
                    .last_mut()
                    .ok_or_else(|| parse_err(ln, "tuple line before any constraint"))?;
                ranks.push(tuple_rank(&values, d));
            }
            other => return Err(parse_err(ln, format!("unknown line tag '{other}'"))),
        }
    }
    if pending.len() != m {
        return Err(Error::Consistency(format!(
            "declared m={m} constraints, found {}",
            pending.len()
        )));
    }
    let constraints = pending
        .into_iter()
        .map(|(scope, ranks)| Constraint::new(scope, ranks, d))
        .collect::<Result<Vec<_>>>()?;
    CspInstance::new(params, seed, constraints, None)
}

/// Sidecar text for a hidden assignment: one `u v` line per variable,
/// both 1-indexed.
pub fn write_solution(t: &Assignment) -> String {
    let mut out = String::new();
    for (u, v) in t.values().iter().enumerate() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

pub fn read_solution(text: &str, n: usize, d: usize) -> Result<Assignment> {
    let mut values = vec![None; n];
    for (idx, line) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(ln, "expected 'u v'"));
        }
        let u = one_indexed(ln, toks[0], n, "variable")?;
        let v = one_indexed(ln, toks[1], d, "value")?;
        if values[u].replace(v).is_some() {
            return Err(parse_err(ln, format!("variable {} assigned twice", u + 1)));
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(u, v)| v.ok_or_else(|| Error::Consistency(format!("variable {} unassigned", u + 1))))
        .collect::<Result<Vec<_>>>()
        .map(Assignment::new)
}
