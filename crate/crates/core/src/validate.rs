//! Cross-checks between independent routes: the oracle-equivalence sweep
//! (forward checking vs DPLL on the encoding vs enumeration) and the
//! Monte-Carlo check of the closed-form solution-count moments.

use crate::analysis::{first_moment_log, forced_expected_count_log};
use crate::encoder::encode_cnf;
use crate::error::Result;
use crate::exec::{map_indexed, Exec};
use crate::generator::{generate, GenRequest};
use crate::model::{CspParams, ModelKind};
use crate::rng::{derive_stream, InstanceRng};
use crate::solver::{dpll, enumerate_solutions, solve_csp, Heuristic, SolveConfig, Status};

/// Small-instance family: `n <= 6`, `d <= 3`, `m <= 10`, arity 2 or 3,
/// both models, random and forced.
pub fn small_family_params(index: u64, base_seed: u64) -> (CspParams, bool) {
    const TIGHTNESS: [f64; 6] = [0.1, 0.25, 0.4, 0.55, 0.7, 0.0];
    let mut rng = InstanceRng::new(derive_stream(base_seed, index));
    let model = if index.is_multiple_of(2) {
        ModelKind::Rb
    } else {
        ModelKind::Rd
    };
    let forced = (index / 2) % 2 == 1;
    loop {
        let n = 3 + rng.below(4) as usize;
        let d = 2 + rng.below(2) as usize;
        let m = 1 + rng.below(10) as usize;
        let k = 2 + rng.below(2) as usize;
        let p = TIGHTNESS[rng.below(TIGHTNESS.len() as u64) as usize];
        if let Ok(params) = CspParams::from_sizes(model, k, n, d, m, p) {
            return (params, forced);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OracleReport {
    pub instances: usize,
    pub sat: usize,
    /// Instances where any two SAT/UNSAT verdicts disagree.
    pub status_discrepancies: usize,
    /// Instances where CNF model count differs from the CSP solution count.
    pub count_discrepancies: usize,
    /// Forced instances not reported SAT.
    pub forced_not_sat: usize,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.status_discrepancies == 0 && self.count_discrepancies == 0 && self.forced_not_sat == 0
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct OracleCase {
    sat: bool,
    status_mismatch: bool,
    count_mismatch: bool,
    forced_not_sat: bool,
}

fn oracle_case(index: u64, base_seed: u64) -> Result<OracleCase> {
    let (params, forced) = small_family_params(index, base_seed);
    let inst = generate(&GenRequest::new(
        params,
        derive_stream(base_seed ^ 0x5EED, index),
        forced,
    ))?;
    let count = enumerate_solutions(&inst, u64::MAX);
    let enum_sat = count > 0;

    let mut verdicts = Vec::new();
    for heuristic in [Heuristic::Lex, Heuristic::Mrv] {
        let cfg = SolveConfig {
            heuristic,
            ..Default::default()
        };
        verdicts.push(solve_csp(&inst, &cfg).status == Status::Sat);
    }
    let cnf = encode_cnf(&inst, None)?;
    verdicts.push(dpll(&cnf, &SolveConfig::default()).status == Status::Sat);
    let cnf_models = dpll(&cnf, &SolveConfig::counting()).solutions;
    let csp_count = solve_csp(&inst, &SolveConfig::counting()).solutions;

    Ok(OracleCase {
        sat: enum_sat,
        status_mismatch: verdicts.iter().any(|&v| v != enum_sat),
        count_mismatch: cnf_models != Some(count) || csp_count != Some(count),
        forced_not_sat: forced && !enum_sat,
    })
}

/// Runs the equivalence sweep over `instances` members of the small family.
pub fn oracle_equivalence(instances: usize, base_seed: u64, exec: Exec) -> Result<OracleReport> {
    let cases = map_indexed(instances, exec, |i| oracle_case(i as u64, base_seed))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(cases.iter().fold(
        OracleReport {
            instances,
            ..Default::default()
        },
        |mut acc, c| {
            acc.sat += c.sat as usize;
            acc.status_discrepancies += c.status_mismatch as usize;
            acc.count_discrepancies += c.count_mismatch as usize;
            acc.forced_not_sat += c.forced_not_sat as usize;
            acc
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub forced: bool,
    pub samples: usize,
    pub empirical_mean: f64,
    pub standard_error: f64,
    pub closed_form: f64,
}

impl MomentCheck {
    /// Deviation in units of the standard error.
    pub fn z_score(&self) -> f64 {
        (self.empirical_mean - self.closed_form) / self.standard_error
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.z_score().abs() <= sigmas
    }
}

/// Mean exact solution count over `samples` generated instances, against
/// `E[N]` (random) or `E_f[N]` (forced).
pub fn moment_check(
    params: &CspParams,
    forced: bool,
    samples: usize,
    base_seed: u64,
    exec: Exec,
) -> Result<MomentCheck> {
    let closed_form = if forced {
        forced_expected_count_log(params)?
    } else {
        first_moment_log(params)?
    }
    .exp();
    let counts = map_indexed(samples, exec, |i| {
        generate(&GenRequest::in_batch(*params, base_seed, i as u64, forced))
            .map(|inst| enumerate_solutions(&inst, u64::MAX) as f64)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let len = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / len;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (len - 1.0);
    Ok(MomentCheck {
        forced,
        samples,
        empirical_mean: mean,
        standard_error: (var / len).sqrt(),
        closed_form,
    })
}

/// Parameters of the moment Monte-Carlo: RD, `k=2, n=4, d=3, m=6, p=0.3`.
pub fn moment_params() -> CspParams {
    CspParams::from_sizes(ModelKind::Rd, 2, 4, 3, 6, 0.3).expect("valid sizes")
}
