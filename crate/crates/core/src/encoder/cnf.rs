use crate::error::{Error, Result};
use crate::model::CspInstance;

use super::fmt_real;

/// A CNF formula over DIMACS-style integer literals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    /// `key=value` pairs written as `c` comment lines.
    pub metadata: Vec<(String, String)>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Self {
        CnfFormula {
            num_vars,
            clauses,
            metadata: Vec::new(),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Checks the literal invariants: nonzero and within `num_vars`.
    pub fn validate(&self) -> Result<()> {
        for (i, clause) in self.clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > self.num_vars {
                    return Err(Error::Consistency(format!(
                        "clause {i} has literal {lit} outside 1..={}",
                        self.num_vars
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Propositional variable for "CSP variable `u` takes value `v`": `u d + v + 1`.
pub fn var_index(u: usize, v: usize, d: usize) -> usize {
    u * d + v + 1
}

/// Direct encoding of `instance`.
///
/// Clause order: one domain clause per variable, then the pairwise
/// at-most-one clauses per variable (`v < v'`), then one conflict clause per
/// incompatible tuple, constraint by constraint in rank order.
///
/// With `split_width = Some(w)`, `w >= 3`, every domain clause longer than
/// `w` becomes a chain `(l_1 .. l_{w-1} y_1)`, `(!y_1 l_w .. y_2)`, ...,
/// `(!y_j ..rest)`; auxiliaries are numbered after the `n d` original
/// variables in order of creation.
pub fn encode_cnf(instance: &CspInstance, split_width: Option<usize>) -> Result<CnfFormula> {
    if let Some(w) = split_width {
        if w < 3 {
            return Err(Error::ParamRange(format!(
                "split width must be >= 3, got {w}"
            )));
        }
    }
    let (n, d) = (instance.n(), instance.d());
    let base_vars = n
        .checked_mul(d)
        .filter(|&v| v <= i32::MAX as usize)
        .ok_or_else(|| Error::Overflow(format!("n d = {n} * {d} exceeds the literal range")))?;
    let lit = |u: usize, v: usize| var_index(u, v, d) as i32;

    let mut next_var = base_vars;
    let mut fresh = || -> Result<i32> {
        if next_var >= i32::MAX as usize {
            return Err(Error::Overflow(
                "auxiliary variables exceed the literal range".into(),
            ));
        }
        next_var += 1;
        Ok(next_var as i32)
    };

    let mut clauses = Vec::new();
    for u in 0..n {
        let domain: Vec<i32> = (0..d).map(|v| lit(u, v)).collect();
        match split_width {
            Some(w) if domain.len() > w => split_clause(&domain, w, &mut fresh, &mut clauses)?,
            _ => clauses.push(domain),
        }
    }
    for u in 0..n {
        for v in 0..d {
            for w in v + 1..d {
                clauses.push(vec![-lit(u, v), -lit(u, w)]);
            }
        }
    }
    for c in instance.constraints() {
        for tuple in c.incompatible_tuples(d) {
            clauses.push(
                c.scope()
                    .iter()
                    .zip(&tuple)
                    .map(|(&u, &v)| -lit(u, v))
                    .collect(),
            );
        }
    }

    let params = instance.params();
    let sizes = instance.sizes();
    let mut metadata: Vec<(String, String)> = vec![
        ("model".into(), params.model.to_string()),
        ("k".into(), params.k.to_string()),
        ("n".into(), params.n.to_string()),
        ("alpha".into(), fmt_real(params.alpha)),
        ("r".into(), fmt_real(params.r)),
        ("p".into(), fmt_real(params.p)),
        ("d".into(), sizes.d.to_string()),
        ("m".into(), sizes.m.to_string()),
        ("q".into(), sizes.q.to_string()),
        ("seed".into(), instance.seed().to_string()),
        ("forced".into(), instance.is_forced().to_string()),
    ];
    if let Some(w) = split_width {
        metadata.push(("split_width".into(), w.to_string()));
    }
    Ok(CnfFormula {
        num_vars: next_var,
        clauses,
        metadata,
    })
}

fn split_clause(
    lits: &[i32],
    width: usize,
    fresh: &mut impl FnMut() -> Result<i32>,
    out: &mut Vec<Vec<i32>>,
) -> Result<()> {
    let mut carry = fresh()?;
    let mut first = lits[..width - 1].to_vec();
    first.push(carry);
    out.push(first);
    let mut rest = &lits[width - 1..];
    while rest.len() > width - 1 {
        let next = fresh()?;
        let mut mid = vec![-carry];
        mid.extend_from_slice(&rest[..width - 2]);
        mid.push(next);
        out.push(mid);
        rest = &rest[width - 2..];
        carry = next;
    }
    let mut last = vec![-carry];
    last.extend_from_slice(rest);
    out.push(last);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, CspParams, ModelKind};

    fn two_var() -> CspInstance {
        let params = CspParams::from_sizes(ModelKind::Rd, 2, 2, 2, 1, 0.25).unwrap();
        let c = Constraint::new(vec![0, 1], vec![1], 2).unwrap();
        CspInstance::new(params, 0, vec![c], None).unwrap()
    }

    #[test]
    fn two_variable_example() {
        let cnf = encode_cnf(&two_var(), None).unwrap();
        assert_eq!(cnf.num_vars, 4);
        assert_eq!(
            cnf.clauses,
            vec![
                vec![1, 2],
                vec![3, 4],
                vec![-1, -2],
                vec![-3, -4],
                vec![-1, -4]
            ]
        );
        assert_eq!(cnf.meta("forced"), Some("false"));
        cnf.validate().unwrap();
    }

    #[test]
    fn clause_count_formula() {
        let params = CspParams::from_sizes(ModelKind::Rb, 3, 6, 3, 5, 0.2).unwrap();
        let inst = crate::generator::generate(&crate::generator::GenRequest::new(params, 1, false))
            .unwrap();
        let cnf = encode_cnf(&inst, None).unwrap();
        let conflicts: usize = inst
            .constraints()
            .iter()
            .map(|c| c.incompatible_count())
            .sum();
        assert_eq!(cnf.clauses.len(), 6 + 6 * 3 + conflicts);
        assert!(cnf.clauses[6 + 18..].iter().all(|c| c.len() == 3));
    }

    #[test]
    fn splitting_shapes() {
        let mut out = Vec::new();
        let mut next = 10;
        let mut fresh = || -> Result<i32> {
            next += 1;
            Ok(next)
        };
        split_clause(&[1, 2, 3, 4, 5, 6, 7], 3, &mut fresh, &mut out).unwrap();
        assert_eq!(
            out,
            vec![
                vec![1, 2, 11],
                vec![-11, 3, 12],
                vec![-12, 4, 13],
                vec![-13, 5, 14],
                vec![-14, 6, 7]
            ]
        );
        let mut out = Vec::new();
        split_clause(&[1, 2, 3, 4, 5, 6], 4, &mut fresh, &mut out).unwrap();
        assert_eq!(out, vec![vec![1, 2, 3, 15], vec![-15, 4, 5, 6]]);
        assert!(out.iter().all(|c| c.len() <= 4));
    }

    #[test]
    fn split_width_too_small() {
        assert!(matches!(
            encode_cnf(&two_var(), Some(2)),
            Err(Error::ParamRange(_))
        ));
    }

    #[test]
    fn narrow_domains_unaffected_by_split() {
        let a = encode_cnf(&two_var(), None).unwrap();
        let b = encode_cnf(&two_var(), Some(3)).unwrap();
        assert_eq!(a.clauses, b.clauses);
        assert_eq!(a.num_vars, b.num_vars);
    }
}
