//! Random and forced-satisfiable instance generation for Model RB and RD.
//!
//! Draw order for one instance, all from a single [`InstanceRng`]:
//!
//! 1. forced mode only: the hidden assignment, variable by variable,
//!    each value uniform in `[0, d)`;
//! 2. the scope of every constraint, constraint by constraint: `k` draws of
//!    partial Fisher-Yates over `0..n`, then sorted ascending;
//! 3. the incompatible set of every constraint, constraint by constraint:
//!    RB draws a Floyd `q`-subset of tuple ranks, RD flips one `p`-coin per
//!    rank in ascending order.
//!
//! In forced mode the hidden tuple `t|scope` is removed from the candidate
//! ranks: RB samples from `d^k - 1` ranks and shifts ranks at or above the
//! hidden one up by one, RD skips the hidden rank without drawing a coin.
//! Since the scope is drawn independently of the tuples, this is exactly
//! the distribution of rejecting whole constraints that the hidden
//! assignment violates.

use crate::error::{Error, Result};
use crate::model::{
    derive_sizes, tuple_rank, Assignment, Constraint, CspInstance, CspParams, ModelKind,
};
use crate::rng::{derive_stream, InstanceRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenRequest {
    pub params: CspParams,
    pub seed: u64,
    pub forced: bool,
}

impl GenRequest {
    pub fn new(params: CspParams, seed: u64, forced: bool) -> Self {
        GenRequest {
            params,
            seed,
            forced,
        }
    }

    /// The `index`-th request of a batch seeded by `base_seed`.
    pub fn in_batch(params: CspParams, base_seed: u64, index: u64, forced: bool) -> Self {
        GenRequest::new(params, derive_stream(base_seed, index), forced)
    }
}

pub fn generate(request: &GenRequest) -> Result<CspInstance> {
    let params = request.params;
    let sizes = derive_sizes(&params)?;
    let (n, k, d) = (params.n, params.k, sizes.d);
    let space = sizes.tuple_space;

    if request.forced {
        match params.model {
            ModelKind::Rb if sizes.q >= space => {
                return Err(Error::ForcedInfeasible(format!(
                    "q = {} leaves no compatible tuple out of d^k = {space}",
                    sizes.q
                )))
            }
            ModelKind::Rd if params.p >= 1.0 => {
                return Err(Error::ForcedInfeasible("p = 1 forbids every tuple".into()))
            }
            _ => {}
        }
    }
    if params.model == ModelKind::Rd && space > u32::MAX as u64 {
        return Err(Error::Size(format!(
            "RD tuple space {space} too large to enumerate"
        )));
    }

    let mut rng = InstanceRng::new(request.seed);

    let hidden = request.forced.then(|| {
        (0..n)
            .map(|_| rng.below(d as u64) as usize)
            .collect::<Vec<_>>()
    });

    let scopes: Vec<Vec<usize>> = (0..sizes.m)
        .map(|_| {
            let mut scope = rng.partial_shuffle(n, k);
            scope.sort_unstable();
            scope
        })
        .collect();

    let mut constraints = Vec::with_capacity(sizes.m);
    for scope in scopes {
        let hidden_rank = hidden.as_ref().map(|h| {
            let proj: Vec<usize> = scope.iter().map(|&u| h[u]).collect();
            tuple_rank(&proj, d)
        });
        let ranks = match params.model {
            ModelKind::Rb => match hidden_rank {
                None => rng.floyd_subset(space, sizes.q),
                Some(h) => rng
                    .floyd_subset(space - 1, sizes.q)
                    .into_iter()
                    .map(|x| if x >= h { x + 1 } else { x })
                    .collect(),
            },
            ModelKind::Rd => (0..space)
                .filter(|&t| Some(t) != hidden_rank && rng.coin(params.p))
                .collect(),
        };
        constraints.push(Constraint::new(scope, ranks, d)?);
    }

    CspInstance::new(
        params,
        request.seed,
        constraints,
        hidden.map(Assignment::new),
    )
}
