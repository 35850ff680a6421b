//! Parameter algebra, instance and assignment types, and the primitive
//! satisfaction checks everything else builds on.
//!
//! Variables and domain values are 0-indexed in memory. A value tuple
//! `(v_1, ..., v_k)` over a constraint scope is identified by its row-major
//! rank `sum v_i * d^(k-i)`; incompatible sets are stored as sorted rank
//! lists, which is the same as ascending lexicographic tuple order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest tuple space for which a constraint keeps a dense bitset.
pub const BITSET_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Exactly `q = round(p d^k)` incompatible tuples per constraint.
    Rb,
    /// Each tuple independently incompatible with probability `p`.
    Rd,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Rb => "rb",
            ModelKind::Rd => "rd",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rb" => Ok(ModelKind::Rb),
            "rd" => Ok(ModelKind::Rd),
            other => Err(Error::ParamRange(format!(
                "unknown model '{other}' (expected 'rb' or 'rd')"
            ))),
        }
    }
}

/// The five-tuple `(k, n, alpha, r, p)` plus the model kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CspParams {
    pub model: ModelKind,
    /// Constraint arity.
    pub k: usize,
    /// Number of variables.
    pub n: usize,
    /// Domain exponent, `d = n^alpha`.
    pub alpha: f64,
    /// Density coefficient, `m = r n ln n`.
    pub r: f64,
    /// Constraint tightness.
    pub p: f64,
}

impl CspParams {
    pub fn new(model: ModelKind, k: usize, n: usize, alpha: f64, r: f64, p: f64) -> Result<Self> {
        let params = CspParams {
            model,
            k,
            n,
            alpha,
            r,
            p,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::ParamRange(format!("k must be >= 2, got {}", self.k)));
        }
        if self.n < 2 {
            return Err(Error::ParamRange(format!("n must be >= 2, got {}", self.n)));
        }
        if self.k > self.n {
            return Err(Error::ParamRange(format!(
                "k = {} exceeds n = {}",
                self.k, self.n
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::ParamRange(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::ParamRange(format!("r must be > 0, got {}", self.r)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::ParamRange(format!(
                "p must lie in [0, 1], got {}",
                self.p
            )));
        }
        Ok(())
    }

    pub fn with_p(self, p: f64) -> Self {
        CspParams { p, ..self }
    }

    pub fn with_r(self, r: f64) -> Self {
        CspParams { r, ..self }
    }

    pub fn with_n(self, n: usize) -> Self {
        CspParams { n, ..self }
    }

    /// Parameters that reproduce a given `(n, d, m)` exactly after rounding.
    pub fn from_sizes(
        model: ModelKind,
        k: usize,
        n: usize,
        d: usize,
        m: usize,
        p: f64,
    ) -> Result<Self> {
        if n < 2 || d < 2 || m < 1 {
            return Err(Error::ParamRange(format!(
                "need n >= 2, d >= 2, m >= 1 (got n={n}, d={d}, m={m})"
            )));
        }
        let ln_n = (n as f64).ln();
        let alpha = (d as f64).ln() / ln_n;
        let r = m as f64 / (n as f64 * ln_n);
        let params = CspParams::new(model, k, n, alpha, r, p)?;
        let sizes = derive_sizes(&params)?;
        if sizes.d != d || sizes.m != m {
            return Err(Error::ParamRange(format!(
                "sizes (d={d}, m={m}) do not survive rounding (got d={}, m={})",
                sizes.d, sizes.m
            )));
        }
        Ok(params)
    }
}

/// Integer sizes derived from [`CspParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DerivedSizes {
    /// Domain size.
    pub d: usize,
    /// Number of constraints.
    pub m: usize,
    /// Incompatible tuples per constraint (meaningful for RB).
    pub q: u64,
    /// `d^k`.
    pub tuple_space: u64,
}

/// `d = round(n^alpha)`, `m = round(r n ln n)`, `q = round(p d^k)`, all
/// rounded half away from zero.
pub fn derive_sizes(params: &CspParams) -> Result<DerivedSizes> {
    params.validate()?;
    let n = params.n as f64;
    let d_real = n.powf(params.alpha).round();
    let m_real = (params.r * n * n.ln()).round();
    if !(d_real >= 2.0) || d_real > u32::MAX as f64 {
        return Err(Error::ParamRange(format!(
            "domain size round(n^alpha) = {d_real} is out of range (need >= 2)"
        )));
    }
    if !(m_real >= 1.0) || m_real > u32::MAX as f64 {
        return Err(Error::ParamRange(format!(
            "constraint count round(r n ln n) = {m_real} is out of range (need >= 1)"
        )));
    }
    let d = d_real as usize;
    let m = m_real as usize;
    let tuple_space = checked_pow(d as u64, params.k).ok_or_else(|| {
        Error::ParamRange(format!("tuple space d^k = {d}^{} overflows u64", params.k))
    })?;
    let q = (params.p * tuple_space as f64)
        .round()
        .clamp(0.0, tuple_space as f64) as u64;
    Ok(DerivedSizes {
        d,
        m,
        q,
        tuple_space,
    })
}

pub(crate) fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Row-major rank of a value tuple.
pub fn tuple_rank(values: &[usize], d: usize) -> u64 {
    values
        .iter()
        .fold(0u64, |acc, &v| acc * d as u64 + v as u64)
}

/// Inverse of [`tuple_rank`] for a tuple of length `k`.
pub fn tuple_from_rank(mut rank: u64, k: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = (rank % d as u64) as usize;
        rank /= d as u64;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Membership {
    Dense(Vec<u64>),
    Sparse,
}

/// A constraint: `k` distinct variables and the set of value tuples they
/// may not take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    scope: Vec<usize>,
    incompatible: Vec<u64>,
    membership: Membership,
}

impl Constraint {
    /// Builds a constraint from a scope and incompatible tuple ranks.
    ///
    /// Ranks are sorted here; duplicates, out-of-range ranks and repeated
    /// scope variables are rejected.
    pub fn new(scope: Vec<usize>, mut incompatible: Vec<u64>, d: usize) -> Result<Self> {
        let k = scope.len();
        for (i, &u) in scope.iter().enumerate() {
            if scope[..i].contains(&u) {
                return Err(Error::Consistency(format!(
                    "variable {u} repeated in constraint scope"
                )));
            }
        }
        let space = checked_pow(d as u64, k)
            .ok_or_else(|| Error::Overflow("tuple space d^k overflows u64".into()))?;
        incompatible.sort_unstable();
        if let Some(w) = incompatible.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Consistency(format!(
                "duplicate incompatible tuple rank {}",
                w[0]
            )));
        }
        if let Some(&last) = incompatible.last() {
            if last >= space {
                return Err(Error::Consistency(format!(
                    "tuple rank {last} outside tuple space of size {space}"
                )));
            }
        }
        let membership = if space <= BITSET_LIMIT {
            let mut bits = vec![0u64; (space as usize).div_ceil(64)];
            for &t in &incompatible {
                bits[(t / 64) as usize] |= 1 << (t % 64);
            }
            Membership::Dense(bits)
        } else {
            Membership::Sparse
        };
        Ok(Constraint {
            scope,
            incompatible,
            membership,
        })
    }

    /// Variables of the constraint, in the order tuple positions refer to.
    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    /// Incompatible tuple ranks in ascending order.
    pub fn incompatible_ranks(&self) -> &[u64] {
        &self.incompatible
    }

    pub fn incompatible_count(&self) -> usize {
        self.incompatible.len()
    }

    /// Incompatible tuples in ascending lexicographic order.
    pub fn incompatible_tuples(&self, d: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
        let k = self.arity();
        self.incompatible
            .iter()
            .map(move |&r| tuple_from_rank(r, k, d))
    }

    #[inline]
    pub fn forbids_rank(&self, rank: u64) -> bool {
        match &self.membership {
            Membership::Dense(bits) => bits[(rank / 64) as usize] >> (rank % 64) & 1 == 1,
            Membership::Sparse => self.incompatible.binary_search(&rank).is_ok(),
        }
    }

    /// Whether the full assignment `values` violates this constraint.
    #[inline]
    pub fn violated_by(&self, values: &[usize], d: usize) -> bool {
        let rank = self
            .scope
            .iter()
            .fold(0u64, |acc, &u| acc * d as u64 + values[u] as u64);
        self.forbids_rank(rank)
    }
}

/// Total map from variables to domain values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<usize>,
}

impl Assignment {
    pub fn new(values: Vec<usize>) -> Self {
        Assignment { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<usize> {
        self.values
    }
}

impl From<Vec<usize>> for Assignment {
    fn from(values: Vec<usize>) -> Self {
        Assignment::new(values)
    }
}

/// Number of positions at which two assignments agree.
pub fn similarity(t1: &Assignment, t2: &Assignment) -> Result<usize> {
    if t1.len() != t2.len() {
        return Err(Error::DimensionMismatch {
            expected: t1.len(),
            actual: t2.len(),
        });
    }
    Ok(t1
        .values
        .iter()
        .zip(&t2.values)
        .filter(|(a, b)| a == b)
        .count())
}

/// `1 - similarity / n`.
pub fn distance(t1: &Assignment, t2: &Assignment) -> Result<f64> {
    let s = similarity(t1, t2)?;
    if t1.is_empty() {
        return Ok(0.0);
    }
    Ok(1.0 - s as f64 / t1.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Satisfaction {
    Satisfied,
    /// Index of the lowest-numbered violated constraint.
    Violated(usize),
}

impl Satisfaction {
    pub fn is_satisfied(self) -> bool {
        matches!(self, Satisfaction::Satisfied)
    }
}

/// A Model RB/RD instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CspInstance {
    params: CspParams,
    sizes: DerivedSizes,
    constraints: Vec<Constraint>,
    seed: u64,
    hidden: Option<Assignment>,
}

impl CspInstance {
    /// Assembles and validates an instance.
    ///
    /// Checks: constraint count equals `m`, every scope has `k` variables
    /// below `n`, RB constraints carry exactly `q` tuples, and the hidden
    /// assignment (if any) satisfies every constraint.
    pub fn new(
        params: CspParams,
        seed: u64,
        constraints: Vec<Constraint>,
        hidden: Option<Assignment>,
    ) -> Result<Self> {
        let sizes = derive_sizes(&params)?;
        if constraints.len() != sizes.m {
            return Err(Error::Consistency(format!(
                "expected m = {} constraints, got {}",
                sizes.m,
                constraints.len()
            )));
        }
        for (i, c) in constraints.iter().enumerate() {
            if c.arity() != params.k {
                return Err(Error::Consistency(format!(
                    "constraint {i} has arity {} (expected k = {})",
                    c.arity(),
                    params.k
                )));
            }
            if let Some(&u) = c.scope().iter().find(|&&u| u >= params.n) {
                return Err(Error::Consistency(format!(
                    "constraint {i} references variable {u} >= n = {}",
                    params.n
                )));
            }
            if c.incompatible
                .last()
                .is_some_and(|&r| r >= sizes.tuple_space)
            {
                return Err(Error::Consistency(format!(
                    "constraint {i} has a tuple outside the domain"
                )));
            }
            if params.model == ModelKind::Rb && c.incompatible_count() as u64 != sizes.q {
                return Err(Error::Consistency(format!(
                    "RB constraint {i} has {} incompatible tuples (expected q = {})",
                    c.incompatible_count(),
                    sizes.q
                )));
            }
        }
        let instance = CspInstance {
            params,
            sizes,
            constraints,
            seed,
            hidden: None,
        };
        if let Some(h) = hidden {
            match instance.check_assignment(&h)? {
                Satisfaction::Satisfied => {}
                Satisfaction::Violated(i) => {
                    return Err(Error::Consistency(format!(
                        "hidden assignment violates constraint {i}"
                    )))
                }
            }
            return Ok(CspInstance {
                hidden: Some(h),
                ..instance
            });
        }
        Ok(instance)
    }

    pub fn params(&self) -> &CspParams {
        &self.params
    }

    pub fn sizes(&self) -> &DerivedSizes {
        &self.sizes
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn d(&self) -> usize {
        self.sizes.d
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The planted assignment of a forced instance.
    pub fn hidden(&self) -> Option<&Assignment> {
        self.hidden.as_ref()
    }

    pub fn is_forced(&self) -> bool {
        self.hidden.is_some()
    }

    /// The same instance with the planted assignment dropped.
    pub fn without_hidden(&self) -> CspInstance {
        CspInstance {
            hidden: None,
            ..self.clone()
        }
    }

    pub fn check_assignment(&self, t: &Assignment) -> Result<Satisfaction> {
        if t.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: t.len(),
            });
        }
        let d = self.d();
        if let Some(&v) = t.values().iter().find(|&&v| v >= d) {
            return Err(Error::Domain(format!(
                "value {v} outside domain of size {d}"
            )));
        }
        Ok(self
            .constraints
            .iter()
            .position(|c| c.violated_by(t.values(), d))
            .map_or(Satisfaction::Satisfied, Satisfaction::Violated))
    }
}
