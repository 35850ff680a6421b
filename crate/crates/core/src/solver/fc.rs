//! Chronological backtracking with forward checking.
//!
//! After each assignment, every constraint left with exactly one
//! unassigned variable prunes the values of that variable which would
//! complete an incompatible tuple. A wiped-out domain fails the assignment
//! immediately. Removals are recorded on a trail and undone on retraction.

use crate::model::{Assignment, CspInstance};

use super::{Flow, Heuristic, SolveConfig, SolveResult, Status};

pub fn solve_csp(instance: &CspInstance, cfg: &SolveConfig) -> SolveResult {
    let mut search = Search::new(instance, cfg);
    let flow = search.descend(0);
    let limited = matches!(flow, Flow::Limit);

    let status = if limited {
        Status::Limit
    } else if search.solutions > 0 {
        Status::Sat
    } else {
        Status::Unsat
    };
    let witness = if status == Status::Sat {
        search.witness.take().map(Assignment::new)
    } else {
        None
    };
    if let Some(w) = &witness {
        assert!(
            instance.check_assignment(w).is_ok_and(|s| s.is_satisfied()),
            "forward checking returned a non-solution"
        );
    }
    SolveResult {
        status,
        witness,
        nodes: search.nodes,
        backtracks: search.backtracks,
        solutions: (cfg.count_all && !limited).then_some(search.solutions),
    }
}

struct Search<'a> {
    instance: &'a CspInstance,
    cfg: &'a SolveConfig,
    n: usize,
    d: usize,
    /// `(constraint, position)` pairs per variable.
    incidence: Vec<Vec<(usize, usize)>>,
    /// `d^(k-1-pos)` for each scope position.
    weights: Vec<u64>,
    open: Vec<usize>,
    value: Vec<Option<usize>>,
    alive: Vec<bool>,
    size: Vec<usize>,
    trail: Vec<(usize, usize)>,
    nodes: u64,
    backtracks: u64,
    solutions: u64,
    witness: Option<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(instance: &'a CspInstance, cfg: &'a SolveConfig) -> Self {
        let (n, d, k) = (instance.n(), instance.d(), instance.k());
        let mut incidence = vec![Vec::new(); n];
        for (ci, c) in instance.constraints().iter().enumerate() {
            for (pos, &u) in c.scope().iter().enumerate() {
                incidence[u].push((ci, pos));
            }
        }
        let weights = (0..k)
            .map(|pos| (d as u64).pow((k - 1 - pos) as u32))
            .collect();
        Search {
            instance,
            cfg,
            n,
            d,
            incidence,
            weights,
            open: instance.constraints().iter().map(|c| c.arity()).collect(),
            value: vec![None; n],
            alive: vec![true; n * d],
            size: vec![d; n],
            trail: Vec::new(),
            nodes: 0,
            backtracks: 0,
            solutions: 0,
            witness: None,
        }
    }

    fn pick_variable(&self) -> usize {
        let unassigned = (0..self.n).filter(|&u| self.value[u].is_none());
        match self.cfg.heuristic {
            Heuristic::Lex => unassigned.min(),
            // min_by_key keeps the first minimum, i.e. the lowest index
            Heuristic::Mrv => unassigned.min_by_key(|&u| self.size[u]),
        }
        .expect("called with every variable assigned")
    }

    fn descend(&mut self, depth: usize) -> Flow {
        if depth == self.n {
            self.solutions += 1;
            if self.witness.is_none() {
                self.witness = Some(self.value.iter().map(|v| v.unwrap()).collect());
            }
            return if self.cfg.count_all {
                Flow::Continue
            } else {
                Flow::Stop
            };
        }
        let x = self.pick_variable();
        for v in 0..self.d {
            if !self.alive[x * self.d + v] {
                continue;
            }
            if self.cfg.node_limit.is_some_and(|limit| self.nodes >= limit) {
                return Flow::Limit;
            }
            self.nodes += 1;
            let mark = self.trail.len();
            self.value[x] = Some(v);
            let consistent = self.propagate(x);
            if consistent {
                match self.descend(depth + 1) {
                    Flow::Continue => {}
                    stop => return stop,
                }
            }
            self.retract(x, mark);
            self.backtracks += 1;
        }
        Flow::Continue
    }

    /// Forward-checks the constraints on `x`; false on a domain wipe-out.
    fn propagate(&mut self, x: usize) -> bool {
        for &(ci, _) in &self.incidence[x] {
            self.open[ci] -= 1;
        }
        let constraints = self.instance.constraints();
        for idx in 0..self.incidence[x].len() {
            let (ci, _) = self.incidence[x][idx];
            if self.open[ci] != 1 {
                continue;
            }
            let c = &constraints[ci];
            let mut base = 0u64;
            let mut free = None;
            for (pos, &u) in c.scope().iter().enumerate() {
                match self.value[u] {
                    Some(val) => base += val as u64 * self.weights[pos],
                    None => free = Some((u, pos)),
                }
            }
            let (y, pos) = free.expect("one open variable");
            let stride = self.weights[pos];
            for w in 0..self.d {
                let slot = y * self.d + w;
                if self.alive[slot] && c.forbids_rank(base + w as u64 * stride) {
                    self.alive[slot] = false;
                    self.size[y] -= 1;
                    self.trail.push((y, w));
                }
            }
            if self.size[y] == 0 {
                return false;
            }
        }
        true
    }

    fn retract(&mut self, x: usize, mark: usize) {
        for (y, w) in self.trail.drain(mark..) {
            self.alive[y * self.d + w] = true;
            self.size[y] += 1;
        }
        for &(ci, _) in &self.incidence[x] {
            self.open[ci] += 1;
        }
        self.value[x] = None;
    }
}
