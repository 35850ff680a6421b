//! Experiment drivers: sweeps across a transition axis, hardness scaling in
//! `n`, and forced versus random-satisfiable cost comparison.
//!
//! Search cost is the forward-checking node count. Runs stopped by the node
//! limit are censored: they count toward `censored`, never toward the SAT
//! fraction, and are left out of the cost statistics unless they make up
//! at least half of a point, in which case they enter at their truncated
//! count and the point is flagged.
//!
//! Seeds: sample `s` of grid point `i` uses
//! `derive_stream(derive_stream(base_seed, i), s)`.

use std::fmt::{self, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::generator::{generate, GenRequest};
use crate::model::{derive_sizes, CspParams};
use crate::rng::derive_stream;
use crate::solver::{solve_csp, Heuristic, SolveConfig, Status};

pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    P,
    R,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p" => Ok(Axis::P),
            "r" => Ok(Axis::R),
            other => Err(Error::ParamRange(format!(
                "unknown axis '{other}' (expected p or r)"
            ))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::P => "p",
            Axis::R => "r",
        })
    }
}

fn sample_seed(base_seed: u64, point: u64, sample: u64) -> u64 {
    derive_stream(derive_stream(base_seed, point), sample)
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Outcome {
    status: Status,
    nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CostStats {
    sat_fraction: f64,
    median_nodes: f64,
    mean_nodes: f64,
    censored: usize,
    samples: usize,
    flagged: bool,
}

fn median(sorted: &[u64]) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        len if len % 2 == 1 => sorted[len / 2] as f64,
        len => 0.5 * (sorted[len / 2 - 1] as f64 + sorted[len / 2] as f64),
    }
}

fn summarize(outcomes: &[Outcome]) -> CostStats {
    let samples = outcomes.len();
    let censored = outcomes
        .iter()
        .filter(|o| o.status == Status::Limit)
        .count();
    let decided = samples - censored;
    let sat = outcomes.iter().filter(|o| o.status == Status::Sat).count();
    let keep_censored = censored * 2 >= samples;
    let mut costs: Vec<u64> = outcomes
        .iter()
        .filter(|o| keep_censored || o.status != Status::Limit)
        .map(|o| o.nodes)
        .collect();
    costs.sort_unstable();
    let mean = if costs.is_empty() {
        f64::NAN
    } else {
        costs.iter().map(|&c| c as f64).sum::<f64>() / costs.len() as f64
    };
    CostStats {
        sat_fraction: if decided == 0 {
            0.0
        } else {
            sat as f64 / decided as f64
        },
        median_nodes: median(&costs),
        mean_nodes: mean,
        censored,
        samples,
        flagged: keep_censored && censored > 0,
    }
}

fn run_one(params: CspParams, seed: u64, forced: bool, cfg: &SolveConfig) -> Result<Outcome> {
    let inst = generate(&GenRequest::new(params, seed, forced))?;
    let res = solve_csp(&inst, cfg);
    Ok(Outcome {
        status: res.status,
        nodes: res.nodes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: CspParams,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub samples_per_point: usize,
    pub base_seed: u64,
    pub node_limit: u64,
    pub forced: bool,
    pub heuristic: Heuristic,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::ParamRange("sweep needs at least one value".into()));
        }
        if self.values.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::ParamRange(
                "sweep values must be sorted ascending".into(),
            ));
        }
        if self.samples_per_point == 0 {
            return Err(Error::ParamRange("samples per point must be >= 1".into()));
        }
        if self.node_limit == 0 {
            return Err(Error::ParamRange("node limit must be >= 1".into()));
        }
        Ok(())
    }

    fn params_at(&self, value: f64) -> Result<CspParams> {
        let params = match self.axis {
            Axis::P => self.base.with_p(value),
            Axis::R => self.base.with_r(value),
        };
        derive_sizes(&params)?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRecord {
    pub axis_value: f64,
    /// SAT share among runs that finished.
    pub sat_fraction: f64,
    pub median_nodes: f64,
    pub mean_nodes: f64,
    pub censored: usize,
    pub samples: usize,
    /// Censored runs made up at least half the point.
    pub flagged: bool,
}

pub fn sweep(spec: &SweepSpec, exec: Exec) -> Result<Vec<ExperimentRecord>> {
    spec.validate()?;
    let points = spec
        .values
        .iter()
        .map(|&v| spec.params_at(v))
        .collect::<Result<Vec<_>>>()?;
    let cfg = SolveConfig {
        node_limit: Some(spec.node_limit),
        heuristic: spec.heuristic,
        count_all: false,
    };
    let per = spec.samples_per_point;
    let outcomes = map_indexed(points.len() * per, exec, |task| {
        let (point, sample) = (task / per, task % per);
        run_one(
            points[point],
            sample_seed(spec.base_seed, point as u64, sample as u64),
            spec.forced,
            &cfg,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(outcomes
        .chunks(per)
        .zip(&spec.values)
        .map(|(chunk, &axis_value)| {
            let s = summarize(chunk);
            ExperimentRecord {
                axis_value,
                sat_fraction: s.sat_fraction,
                median_nodes: s.median_nodes,
                mean_nodes: s.mean_nodes,
                censored: s.censored,
                samples: s.samples,
                flagged: s.flagged,
            }
        })
        .collect())
}

pub const SWEEP_CSV_HEADER: &str =
    "axis_value,sat_fraction,median_nodes,mean_nodes,censored,samples,flagged";

pub fn sweep_csv(records: &[ExperimentRecord]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.axis_value,
            r.sat_fraction,
            r.median_nodes,
            r.mean_nodes,
            r.censored,
            r.samples,
            r.flagged
        );
    }
    out
}

/// Axis value where the SAT fraction first drops through 0.5, by linear
/// interpolation between the two bracketing grid points.
pub fn threshold_crossing(records: &[ExperimentRecord]) -> Option<f64> {
    records.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.sat_fraction >= 0.5 && b.sat_fraction < 0.5 {
            let t = (a.sat_fraction - 0.5) / (a.sat_fraction - b.sat_fraction);
            Some(a.axis_value + t * (b.axis_value - a.axis_value))
        } else {
            None
        }
    })
}

/// Axis value of the grid point with the largest median cost (first one
/// on ties).
pub fn cost_peak(records: &[ExperimentRecord]) -> Option<f64> {
    records
        .iter()
        .filter(|r| !r.median_nodes.is_nan())
        .fold(None::<&ExperimentRecord>, |best, r| match best {
            Some(b) if b.median_nodes >= r.median_nodes => Some(b),
            _ => Some(r),
        })
        .map(|r| r.axis_value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSpec {
    /// `k`, `alpha`, `r`, `p` held fixed; `n` is replaced per point.
    pub base: CspParams,
    pub n_values: Vec<usize>,
    pub samples: usize,
    pub base_seed: u64,
    pub node_limit: u64,
    pub heuristic: Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRecord {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub median_nodes: f64,
    pub mean_nodes: f64,
    pub sat_fraction: f64,
    pub censored: usize,
    pub samples: usize,
    pub flagged: bool,
}

/// Forced instances at fixed `(k, alpha, r, p)` for each `n`. Seeds are
/// keyed by the value of `n`, not its position in the list.
pub fn scaling_study(spec: &ScalingSpec, exec: Exec) -> Result<Vec<ScalingRecord>> {
    if spec.n_values.is_empty() || spec.samples == 0 || spec.node_limit == 0 {
        return Err(Error::ParamRange(
            "scaling study needs n values, samples >= 1 and node limit >= 1".into(),
        ));
    }
    let points = spec
        .n_values
        .iter()
        .map(|&n| {
            let params = spec.base.with_n(n);
            params.validate()?;
            Ok((params, derive_sizes(&params)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let cfg = SolveConfig {
        node_limit: Some(spec.node_limit),
        heuristic: spec.heuristic,
        count_all: false,
    };
    let per = spec.samples;
    let outcomes = map_indexed(points.len() * per, exec, |task| {
        let (point, sample) = (task / per, task % per);
        let (params, _) = points[point];
        run_one(
            params,
            sample_seed(spec.base_seed, params.n as u64, sample as u64),
            true,
            &cfg,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(outcomes
        .chunks(per)
        .zip(&points)
        .map(|(chunk, (params, sizes))| {
            let s = summarize(chunk);
            ScalingRecord {
                n: params.n,
                d: sizes.d,
                m: sizes.m,
                median_nodes: s.median_nodes,
                mean_nodes: s.mean_nodes,
                sat_fraction: s.sat_fraction,
                censored: s.censored,
                samples: s.samples,
                flagged: s.flagged,
            }
        })
        .collect())
}

pub const SCALING_CSV_HEADER: &str =
    "n,d,m,median_nodes,mean_nodes,sat_fraction,censored,samples,flagged";

pub fn scaling_csv(records: &[ScalingRecord]) -> String {
    let mut out = format!("{SCALING_CSV_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.d,
            r.m,
            r.median_nodes,
            r.mean_nodes,
            r.sat_fraction,
            r.censored,
            r.samples,
            r.flagged
        );
    }
    out
}

/// Least-squares slope of `ln(median_nodes)` against `n`.
pub fn log_cost_slope(records: &[ScalingRecord]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.median_nodes > 0.0)
        .map(|r| (r.n as f64, r.median_nodes.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSpec {
    pub params: CspParams,
    /// Target sample count for each arm.
    pub samples: usize,
    pub base_seed: u64,
    pub node_limit: u64,
    pub heuristic: Heuristic,
    /// Random instances generated at most while collecting SAT ones.
    pub max_random_draws: usize,
}

/// Minimum number of random-satisfiable instances for a comparison.
pub const MIN_RANDOM_SAT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonSummary {
    pub median_forced: f64,
    pub median_random_sat: f64,
    /// `median_forced / median_random_sat`.
    pub ratio: f64,
    pub mean_forced: f64,
    pub mean_random_sat: f64,
    pub forced_samples: usize,
    pub forced_censored: usize,
    pub random_sat_samples: usize,
    pub random_generated: usize,
    pub random_discarded_unsat: usize,
    pub random_censored: usize,
}

/// Solves forced instances and random instances filtered to the satisfiable
/// ones, and compares median search costs.
///
/// Forced samples use point index 0 of the seed scheme, random draws point
/// index 1. Random draws are solved in batches and accepted in draw order,
/// so the accepted set is independent of the execution mode.
pub fn forced_vs_random(spec: &ComparisonSpec, exec: Exec) -> Result<ComparisonSummary> {
    if spec.samples == 0 || spec.node_limit == 0 {
        return Err(Error::ParamRange(
            "comparison needs samples >= 1 and node limit >= 1".into(),
        ));
    }
    derive_sizes(&spec.params)?;
    let cfg = SolveConfig {
        node_limit: Some(spec.node_limit),
        heuristic: spec.heuristic,
        count_all: false,
    };
    let forced = map_indexed(spec.samples, exec, |s| {
        run_one(
            spec.params,
            sample_seed(spec.base_seed, 0, s as u64),
            true,
            &cfg,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let forced_stats = summarize(&forced);

    let mut accepted: Vec<Outcome> = Vec::with_capacity(spec.samples);
    let (mut generated, mut unsat, mut censored) = (0usize, 0usize, 0usize);
    while accepted.len() < spec.samples && generated < spec.max_random_draws {
        let batch = spec.samples.max(16).min(spec.max_random_draws - generated);
        let start = generated;
        let outcomes = map_indexed(batch, exec, |j| {
            run_one(
                spec.params,
                sample_seed(spec.base_seed, 1, (start + j) as u64),
                false,
                &cfg,
            )
        });
        for outcome in outcomes {
            if accepted.len() == spec.samples {
                break;
            }
            generated += 1;
            let outcome = outcome?;
            match outcome.status {
                Status::Sat => accepted.push(outcome),
                Status::Unsat => unsat += 1,
                Status::Limit => censored += 1,
            }
        }
    }
    if accepted.len() < MIN_RANDOM_SAT.min(spec.samples) {
        return Err(Error::InsufficientSamples {
            found: accepted.len(),
            needed: MIN_RANDOM_SAT.min(spec.samples),
        });
    }
    let random_stats = summarize(&accepted);
    Ok(ComparisonSummary {
        median_forced: forced_stats.median_nodes,
        median_random_sat: random_stats.median_nodes,
        ratio: forced_stats.median_nodes / random_stats.median_nodes,
        mean_forced: forced_stats.mean_nodes,
        mean_random_sat: random_stats.mean_nodes,
        forced_samples: forced_stats.samples,
        forced_censored: forced_stats.censored,
        random_sat_samples: accepted.len(),
        random_generated: generated,
        random_discarded_unsat: unsat,
        random_censored: censored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKind;

    fn outcome(status: Status, nodes: u64) -> Outcome {
        Outcome { status, nodes }
    }

    #[test]
    fn summary_excludes_minor_censoring() {
        let s = summarize(&[
            outcome(Status::Sat, 10),
            outcome(Status::Unsat, 30),
            outcome(Status::Sat, 20),
            outcome(Status::Limit, 1000),
        ]);
        assert_eq!(s.censored, 1);
        assert_eq!(s.median_nodes, 20.0);
        assert_eq!(s.mean_nodes, 20.0);
        assert!((s.sat_fraction - 2.0 / 3.0).abs() < 1e-15);
        assert!(!s.flagged);
    }

    #[test]
    fn summary_keeps_majority_censoring() {
        let s = summarize(&[
            outcome(Status::Sat, 10),
            outcome(Status::Limit, 100),
            outcome(Status::Limit, 100),
        ]);
        assert_eq!(s.median_nodes, 100.0);
        assert!(s.flagged);
        let s = summarize(&[outcome(Status::Limit, 100)]);
        assert_eq!(s.sat_fraction, 0.0);
        assert!(s.flagged);
    }

    #[test]
    fn crossing_and_peak() {
        let rec = |v: f64, f: f64, med: f64| ExperimentRecord {
            axis_value: v,
            sat_fraction: f,
            median_nodes: med,
            mean_nodes: med,
            censored: 0,
            samples: 10,
            flagged: false,
        };
        let rs = [
            rec(0.1, 1.0, 5.0),
            rec(0.2, 0.7, 9.0),
            rec(0.3, 0.3, 12.0),
            rec(0.4, 0.0, 4.0),
        ];
        assert!((threshold_crossing(&rs).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(cost_peak(&rs), Some(0.3));
        assert_eq!(threshold_crossing(&rs[..1]), None);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.2, 0.6, 5);
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.2);
        assert!((v[4] - 0.6).abs() < 1e-15);
    }

    fn small_base() -> CspParams {
        CspParams::new(ModelKind::Rb, 2, 10, 0.8, 1.5, 0.3).unwrap()
    }

    #[test]
    fn sweep_extremes_and_determinism() {
        let spec = SweepSpec {
            base: small_base(),
            axis: Axis::P,
            values: vec![0.0, 0.3, 1.0],
            samples_per_point: 20,
            base_seed: 7,
            node_limit: DEFAULT_NODE_LIMIT,
            forced: false,
            heuristic: Heuristic::Mrv,
        };
        let a = sweep(&spec, Exec::Parallel).unwrap();
        let b = sweep(&spec, Exec::Sequential).unwrap();
        assert_eq!(sweep_csv(&a), sweep_csv(&b));
        assert_eq!(a.len(), 3);
        assert_eq!(a[0].sat_fraction, 1.0);
        assert_eq!(a[2].sat_fraction, 0.0);
        assert_eq!(sweep_csv(&a).lines().count(), 4);
    }

    #[test]
    fn sweep_rejects_bad_specs() {
        let mut spec = SweepSpec {
            base: small_base(),
            axis: Axis::P,
            values: vec![0.3, 0.2],
            samples_per_point: 2,
            base_seed: 0,
            node_limit: 10,
            forced: false,
            heuristic: Heuristic::Mrv,
        };
        assert!(sweep(&spec, Exec::Sequential).is_err());
        spec.values = vec![];
        assert!(sweep(&spec, Exec::Sequential).is_err());
        spec.values = vec![0.2];
        spec.samples_per_point = 0;
        assert!(sweep(&spec, Exec::Sequential).is_err());
    }

    #[test]
    fn scaling_is_deterministic_per_n() {
        let spec = ScalingSpec {
            base: small_base(),
            n_values: vec![8, 10],
            samples: 8,
            base_seed: 3,
            node_limit: DEFAULT_NODE_LIMIT,
            heuristic: Heuristic::Mrv,
        };
        let a = scaling_study(&spec, Exec::Parallel).unwrap();
        let single = ScalingSpec {
            n_values: vec![10],
            ..spec.clone()
        };
        let b = scaling_study(&single, Exec::Sequential).unwrap();
        assert_eq!(a[1], b[0]);
        assert!(a.iter().all(|r| r.sat_fraction == 1.0));
    }

    #[test]
    fn comparison_at_zero_tightness() {
        let spec = ComparisonSpec {
            params: small_base().with_p(0.0),
            samples: 12,
            base_seed: 1,
            node_limit: DEFAULT_NODE_LIMIT,
            heuristic: Heuristic::Mrv,
            max_random_draws: 100,
        };
        let s = forced_vs_random(&spec, Exec::default()).unwrap();
        assert_eq!(s.median_forced, 10.0);
        assert_eq!(s.median_random_sat, 10.0);
        assert_eq!(s.ratio, 1.0);
        assert_eq!(s.random_discarded_unsat, 0);
        assert_eq!(s, forced_vs_random(&spec, Exec::Sequential).unwrap());
    }

    #[test]
    fn comparison_reports_insufficient_samples() {
        let spec = ComparisonSpec {
            params: small_base().with_p(0.9),
            samples: 20,
            base_seed: 1,
            node_limit: DEFAULT_NODE_LIMIT,
            heuristic: Heuristic::Mrv,
            max_random_draws: 30,
        };
        assert!(matches!(
            forced_vs_random(&spec, Exec::default()),
            Err(Error::InsufficientSamples { .. })
        ));
    }
}
