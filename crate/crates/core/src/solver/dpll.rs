//! Minimal DPLL: unit propagation to fixpoint, then branch on the
//! lowest-index unassigned variable, true first.

use crate::encoder::{var_index, CnfFormula};
use crate::model::Assignment;

use super::{Flow, SolveConfig, SolveResult, Status};

pub fn dpll(cnf: &CnfFormula, cfg: &SolveConfig) -> SolveResult {
    let mut solver = Dpll {
        cnf,
        cfg,
        value: vec![0; cnf.num_vars + 1],
        trail: Vec::new(),
        nodes: 0,
        backtracks: 0,
        models: 0,
        witness: None,
    };
    let flow = if cnf.clauses.iter().any(|c| c.is_empty()) {
        Flow::Continue
    } else {
        solver.search()
    };
    let limited = matches!(flow, Flow::Limit);
    let status = if limited {
        Status::Limit
    } else if solver.models > 0 {
        Status::Sat
    } else {
        Status::Unsat
    };
    SolveResult {
        status,
        witness: (status == Status::Sat)
            .then(|| solver.witness.take().map(Assignment::new))
            .flatten(),
        nodes: solver.nodes,
        backtracks: solver.backtracks,
        solutions: (cfg.count_all && !limited).then_some(solver.models),
    }
}

/// Reads the CSP assignment out of a model of the direct encoding; `None`
/// if some variable does not have exactly one true value.
pub fn decode_model(model: &Assignment, n: usize, d: usize) -> Option<Assignment> {
    let bits = model.values();
    (0..n)
        .map(|u| {
            let mut chosen = (0..d).filter(|&v| bits.get(var_index(u, v, d) - 1) == Some(&1));
            match (chosen.next(), chosen.next()) {
                (Some(v), None) => Some(v),
                _ => None,
            }
        })
        .collect::<Option<Vec<_>>>()
        .map(Assignment::new)
}

struct Dpll<'a> {
    cnf: &'a CnfFormula,
    cfg: &'a SolveConfig,
    /// 1-indexed; 1 true, -1 false, 0 open.
    value: Vec<i8>,
    trail: Vec<usize>,
    nodes: u64,
    backtracks: u64,
    models: u64,
    witness: Option<Vec<usize>>,
}

enum Propagation {
    Conflict,
    Satisfied,
    Open,
}

impl Dpll<'_> {
    fn lit_value(&self, lit: i32) -> i8 {
        let v = self.value[lit.unsigned_abs() as usize];
        if lit > 0 {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, lit: i32) {
        let var = lit.unsigned_abs() as usize;
        self.value[var] = if lit > 0 { 1 } else { -1 };
        self.trail.push(var);
    }

    fn undo(&mut self, mark: usize) {
        for var in self.trail.drain(mark..) {
            self.value[var] = 0;
        }
    }

    fn propagate(&mut self) -> Propagation {
        loop {
            let mut changed = false;
            let mut all_sat = true;
            for clause in &self.cnf.clauses {
                let mut open = None;
                let mut open_count = 0;
                let mut sat = false;
                for &lit in clause {
                    match self.lit_value(lit) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => {
                            open_count += 1;
                            open = Some(lit);
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                all_sat = false;
                match open_count {
                    0 => return Propagation::Conflict,
                    1 => {
                        self.assign(open.unwrap());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if all_sat {
                return Propagation::Satisfied;
            }
            if !changed {
                return Propagation::Open;
            }
        }
    }

    fn search(&mut self) -> Flow {
        let mark = self.trail.len();
        match self.propagate() {
            Propagation::Conflict => {
                self.undo(mark);
                return Flow::Continue;
            }
            Propagation::Satisfied => {
                let free = self.value[1..].iter().filter(|&&v| v == 0).count();
                let extensions = if free >= 64 { u64::MAX } else { 1u64 << free };
                self.models = self.models.saturating_add(extensions);
                if self.witness.is_none() {
                    self.witness =
                        Some(self.value[1..].iter().map(|&v| (v == 1) as usize).collect());
                }
                if !self.cfg.count_all {
                    return Flow::Stop;
                }
                self.undo(mark);
                return Flow::Continue;
            }
            Propagation::Open => {}
        }
        let var = (1..self.value.len())
            .find(|&v| self.value[v] == 0)
            .expect("open formula has an unassigned variable");
        for lit in [var as i32, -(var as i32)] {
            if self.cfg.node_limit.is_some_and(|limit| self.nodes >= limit) {
                return Flow::Limit;
            }
            self.nodes += 1;
            let branch = self.trail.len();
            self.assign(lit);
            match self.search() {
                Flow::Continue => {}
                stop => return stop,
            }
            self.undo(branch);
            self.backtracks += 1;
        }
        self.undo(mark);
        Flow::Continue
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> CnfFormula {
        CnfFormula::new(
            4,
            vec![
                vec![1, 2],
                vec![3, 4],
                vec![-1, -2],
                vec![-3, -4],
                vec![-1, -4],
            ],
        )
    }

    /// Truth-table model count.
    fn brute_count(cnf: &CnfFormula) -> u64 {
        (0u64..1 << cnf.num_vars)
            .filter(|bits| {
                cnf.clauses.iter().all(|c| {
                    c.iter().any(|&l| {
                        let b = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                        if l > 0 {
                            b
                        } else {
                            !b
                        }
                    })
                })
            })
            .count() as u64
    }

    #[test]
    fn example_has_three_models() {
        let cnf = example();
        assert_eq!(brute_count(&cnf), 3);
        let res = dpll(&cnf, &SolveConfig::counting());
        assert_eq!(res.status, Status::Sat);
        assert_eq!(res.solutions, Some(3));
        let w = res.witness.unwrap();
        let decoded = decode_model(&w, 2, 2).unwrap();
        assert_ne!(decoded.values(), &[0, 1]);
    }

    #[test]
    fn empty_clause_is_immediately_unsat() {
        let cnf = CnfFormula::new(2, vec![vec![1, 2], vec![]]);
        let res = dpll(&cnf, &SolveConfig::default());
        assert_eq!(res.status, Status::Unsat);
        assert_eq!(res.nodes, 0);
    }

    #[test]
    fn free_variables_counted() {
        let cnf = CnfFormula::new(5, vec![vec![1, 2]]);
        assert_eq!(dpll(&cnf, &SolveConfig::counting()).solutions, Some(3 * 8));
        let cnf = CnfFormula::new(3, vec![]);
        assert_eq!(dpll(&cnf, &SolveConfig::counting()).solutions, Some(8));
    }

    #[test]
    fn counts_match_truth_table() {
        // pseudo-random 3-CNFs over 8 variables
        let mut state = 12345u64;
        let mut next = || {
            state = crate::rng::mix64(state);
            state
        };
        for _ in 0..200 {
            let clauses: Vec<Vec<i32>> = (0..(next() % 30))
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            let v = (next() % 8 + 1) as i32;
                            if next() & 1 == 1 {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect()
                })
                .collect();
            let cnf = CnfFormula::new(8, clauses);
            let res = dpll(&cnf, &SolveConfig::counting());
            assert_eq!(res.solutions, Some(brute_count(&cnf)));
            let first = dpll(&cnf, &SolveConfig::default());
            assert_eq!(first.status == Status::Sat, brute_count(&cnf) > 0);
        }
    }

    #[test]
    fn limit() {
        let cnf = CnfFormula::new(6, vec![vec![1, 2, 3], vec![-1, -2], vec![4, 5, 6]]);
        let res = dpll(&cnf, &SolveConfig::with_limit(1));
        assert_eq!(res.status, Status::Limit);
    }
}
