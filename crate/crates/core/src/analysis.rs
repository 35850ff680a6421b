//! Closed-form quantities of Model RB/RD: thresholds and their side
//! conditions, solution-count moments, distance profiles, the random 3-SAT
//! comparison exponents, and flawed-tuple probabilities.
//!
//! Moments are evaluated in natural-log space at finite `n` with the
//! rounded integer sizes `d`, `m`, `q`. RB uses its effective tightness
//! `q / d^k` and the without-replacement pair factor.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{derive_sizes, CspParams, ModelKind};

/// `r_cr = -alpha / ln(1 - p)`.
pub fn r_threshold(alpha: f64, p: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be > 0, got {alpha}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(-alpha / (-p).ln_1p())
}

/// `p_cr = 1 - exp(-alpha / r)`.
pub fn p_threshold(alpha: f64, r: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(r > 0.0) {
        return Err(Error::Domain(format!(
            "alpha and r must be > 0, got alpha={alpha}, r={r}"
        )));
    }
    Ok(-(-alpha / r).exp_m1())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub satisfied: bool,
    /// Signed slack; nonnegative (positive for strict inequalities) when
    /// satisfied.
    pub margin: f64,
}

/// Side conditions for the r and p transitions.
pub fn check_conditions(params: &CspParams) -> Vec<Condition> {
    let k = params.k as f64;
    let alpha_margin = params.alpha - 1.0 / k;
    let p_margin = if params.p < 1.0 {
        k - 1.0 / (1.0 - params.p)
    } else {
        f64::NEG_INFINITY
    };
    let r_margin = k * (-params.alpha / params.r).exp() - 1.0;
    vec![
        Condition {
            name: "alpha_gt_inv_k",
            satisfied: alpha_margin > 0.0,
            margin: alpha_margin,
        },
        Condition {
            name: "k_ge_inv_one_minus_p",
            satisfied: p_margin >= 0.0,
            margin: p_margin,
        },
        Condition {
            name: "k_exp_neg_alpha_over_r_ge_1",
            satisfied: r_margin >= 0.0,
            margin: r_margin,
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    /// Critical density at the given `p`; `None` unless `0 < p < 1`.
    pub r_cr: Option<f64>,
    /// Critical tightness at the given `r`.
    pub p_cr: f64,
    pub conditions: Vec<Condition>,
}

pub fn threshold_report(params: &CspParams) -> Result<ThresholdReport> {
    Ok(ThresholdReport {
        r_cr: r_threshold(params.alpha, params.p).ok(),
        p_cr: p_threshold(params.alpha, params.r)?,
        conditions: check_conditions(params),
    })
}

/// `ln C(n, k)` via log-gamma; `-inf` when `k > n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// `ln sum exp(x_i)`, stable for large magnitudes. Empty input gives `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max.is_infinite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `p` for RD, `q / d^k` for RB.
pub fn effective_tightness(params: &CspParams) -> Result<f64> {
    let sizes = derive_sizes(params)?;
    Ok(match params.model {
        ModelKind::Rd => params.p,
        ModelKind::Rb => sizes.q as f64 / sizes.tuple_space as f64,
    })
}

/// `ln E[N] = n ln d + m ln(1 - p_eff)`; `-inf` when every tuple is
/// forbidden.
pub fn first_moment_log(params: &CspParams) -> Result<f64> {
    let sizes = derive_sizes(params)?;
    let p_eff = effective_tightness(params)?;
    Ok(params.n as f64 * (sizes.d as f64).ln() + sizes.m as f64 * (-p_eff).ln_1p())
}

/// Probability that a uniform `k`-subset of `n` variables falls inside a
/// fixed set of `s` variables, `C(s,k) / C(n,k)`.
fn scope_inside(s: usize, n: usize, k: usize) -> f64 {
    if s < k {
        return 0.0;
    }
    (0..k).map(|j| (s - j) as f64 / (n - j) as f64).product()
}

/// Log-probability that one random constraint is satisfied by both
/// assignments of a pair agreeing on `s` variables.
///
/// With `sigma = C(s,k)/C(n,k)` the chance that the scope lies inside the
/// agreement set (both assignments then induce the same tuple):
/// RD gives `(1-p) sigma + (1-p)^2 (1 - sigma)`, RB gives
/// `(1-p_eff) sigma + (1 - sigma) (D-q)(D-q-1) / (D(D-1))` with `D = d^k`.
pub fn pair_sat_prob_log(params: &CspParams, s: usize) -> Result<f64> {
    if s > params.n {
        return Err(Error::Domain(format!(
            "similarity {s} outside [0, {}]",
            params.n
        )));
    }
    let sizes = derive_sizes(params)?;
    let sigma = scope_inside(s, params.n, params.k);
    let p_eff = effective_tightness(params)?;
    let both_distinct = match params.model {
        ModelKind::Rd => (1.0 - p_eff) * (1.0 - p_eff),
        ModelKind::Rb => {
            let big = sizes.tuple_space as f64;
            let free = (sizes.tuple_space - sizes.q) as f64;
            if free < 1.0 {
                0.0
            } else {
                free * (free - 1.0) / (big * (big - 1.0))
            }
        }
    };
    Ok(((1.0 - p_eff) * sigma + (1.0 - sigma) * both_distinct).ln())
}

fn require_satisfiable_tightness(params: &CspParams) -> Result<()> {
    if effective_tightness(params)? >= 1.0 {
        return Err(Error::Domain(
            "effective tightness is 1: no assignment satisfies any constraint".into(),
        ));
    }
    Ok(())
}

/// `ln(C(n,s) (d-1)^(n-s))`: assignments at similarity `s` from a fixed one.
fn ln_shell(n: usize, d: usize, s: usize) -> f64 {
    let other = (n - s) as f64;
    let tail = if other == 0.0 {
        0.0
    } else {
        other * ((d - 1) as f64).ln()
    };
    ln_binomial(n, s) + tail
}

/// `ln E[N^2]`, summing pair probabilities over similarity shells.
pub fn second_moment_log(params: &CspParams) -> Result<f64> {
    require_satisfiable_tightness(params)?;
    let sizes = derive_sizes(params)?;
    let (n, d, m) = (params.n, sizes.d, sizes.m as f64);
    let ln_d = (d as f64).ln();
    let terms = (0..=n)
        .map(|s| Ok(ln_shell(n, d, s) + n as f64 * ln_d + m * pair_sat_prob_log(params, s)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(log_sum_exp(&terms))
}

/// `ln E_f[N] = ln E[N^2] - ln E[N]`: expected solution count of a forced
/// instance.
pub fn forced_expected_count_log(params: &CspParams) -> Result<f64> {
    Ok(second_moment_log(params)? - first_moment_log(params)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    /// Number of variables agreeing with the reference assignment.
    pub s: usize,
    /// `1 - s / n`.
    pub d_t: f64,
    /// `ln` of the expected number of solutions at this similarity.
    pub log_expected: f64,
}

/// Expected solution counts by similarity to a reference assignment.
///
/// Random: `ln C(n,s) + (n-s) ln(d-1) + m ln(1-p_eff)`.
/// Forced (reference = hidden assignment): the same shell size times
/// `[P(pair at s satisfies a constraint) / (1-p_eff)]^m`.
pub fn distance_profile(params: &CspParams, forced: bool) -> Result<Vec<ProfilePoint>> {
    let sizes = derive_sizes(params)?;
    let (n, d, m) = (params.n, sizes.d, sizes.m as f64);
    if forced {
        require_satisfiable_tightness(params)?;
    }
    let ln_keep = (-effective_tightness(params)?).ln_1p();
    (0..=n)
        .map(|s| {
            let per_constraint = if forced {
                pair_sat_prob_log(params, s)? - ln_keep
            } else {
                ln_keep
            };
            Ok(ProfilePoint {
                s,
                d_t: 1.0 - s as f64 / n as f64,
                log_expected: ln_shell(n, d, s) + m * per_constraint,
            })
        })
        .collect()
}

fn binary_entropy(x: f64) -> f64 {
    let term = |y: f64| if y <= 0.0 { 0.0 } else { -y * y.ln() };
    term(x) + term(1.0 - x)
}

/// Per-variable exponent of the random 3-SAT distance profile:
/// `H(d_t) + r ln((6 + (1-d_t)^3) / 7)` for forced instances and
/// `H(d_t) + r ln(7/8)` for random ones, with `H` the natural-log binary
/// entropy (zero at the endpoints).
pub fn threesat_profile_exponent(d_t: f64, r: f64, forced: bool) -> Result<f64> {
    if !(0.0..=1.0).contains(&d_t) {
        return Err(Error::Domain(format!("d_t must lie in [0, 1], got {d_t}")));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be > 0, got {r}")));
    }
    let clause_term = if forced {
        ((6.0 + (1.0 - d_t).powi(3)) / 7.0).ln()
    } else {
        (7.0f64 / 8.0).ln()
    };
    Ok(binary_entropy(d_t) + r * clause_term)
}

/// Maximizes `f` on `[0, 1]`: a scan at step `1e-3`, then golden-section
/// search on the two cells around the best grid point down to width `1e-6`.
pub fn maximize_exponent<F: Fn(f64) -> f64>(f: F) -> (f64, f64) {
    const CELLS: usize = 1000;
    const TOL: f64 = 1e-6;
    let step = 1.0 / CELLS as f64;
    let (mut best_x, mut best_y) = (0.0, f(0.0));
    for i in 1..=CELLS {
        let x = i as f64 * step;
        let y = f(x);
        if y > best_y {
            best_x = x;
            best_y = y;
        }
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = (best_x - step).max(0.0);
    let mut hi = (best_x + step).min(1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let y = f(x);
    if y >= best_y {
        (x, y)
    } else {
        (best_x, best_y)
    }
}

/// RD: probability that all `d` values of a variable are flawed by `i`
/// constraints, `[1 - (1-p)^i]^d`.
pub fn flawed_prob_rd(d: usize, p: f64, i: usize) -> f64 {
    if i == 0 {
        return 0.0;
    }
    let one_value = -(i as f64 * (-p).ln_1p()).exp_m1();
    one_value.powf(d as f64)
}

/// Largest domain accepted by [`flawed_prob_rb`].
pub const FLAWED_RB_MAX_D: usize = 64;

/// RB: probability that all `d` values of a variable are flawed by `i`
/// constraints, by inclusion-exclusion over the set of unflawed values:
/// `1 + sum_{j=1..d} (-1)^j C(d,j) [C(D-j, q) / C(D, q)]^i`, `D = d^k`.
///
/// Every term is put over the common denominator
/// `[D (D-1) ... (D-d+1)]^i` and the alternating sum is carried out in
/// exact integer arithmetic, so the only rounding is the final division.
pub fn flawed_prob_rb(d: usize, k: usize, q: u64, i: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("d must be >= 1".into()));
    }
    if d > FLAWED_RB_MAX_D {
        return Err(Error::Size(format!(
            "d = {d} exceeds the exact-summation limit {FLAWED_RB_MAX_D}"
        )));
    }
    let space = crate::model::checked_pow(d as u64, k)
        .ok_or_else(|| Error::Overflow(format!("d^k = {d}^{k} overflows u64")))?;
    if q > space {
        return Err(Error::Domain(format!("q = {q} exceeds d^k = {space}")));
    }
    if i == 0 || q == 0 {
        return Ok(0.0);
    }
    let free = space - q;
    // numerators[j] = prod_{t<j} (D-q-t) * prod_{j<=t<d} (D-t)
    let denominator: BigUint = (0..d as u64).map(|t| BigUint::from(space - t)).product();
    let mut positive = BigUint::zero();
    let mut negative = BigUint::zero();
    let mut binom = BigUint::from(1u32);
    for j in 0..=d {
        if j > 0 {
            binom = binom * BigUint::from((d - j + 1) as u64) / BigUint::from(j as u64);
        }
        if (j as u64) > free {
            break;
        }
        let head: BigUint = (0..j as u64).map(|t| BigUint::from(free - t)).product();
        let tail: BigUint = (j as u64..d as u64)
            .map(|t| BigUint::from(space - t))
            .product();
        let term = &binom * (head * tail).pow(i as u32);
        if j % 2 == 0 {
            positive += term;
        } else {
            negative += term;
        }
    }
    if negative >= positive {
        return Ok(0.0);
    }
    let value = ratio_to_f64(&(positive - negative), &denominator.pow(i as u32));
    Ok(value.clamp(0.0, 1.0))
}

fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let quotient = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    libm::ldexp(quotient.to_f64().unwrap_or(f64::INFINITY), -shift as i32)
}
