//! Expansions of `det Δ` over stacks of edges `ξ` and well-chained
//! permutations `σ ∈ Σ(ξ)`, the two regroupings of the factorial weight, and
//! the rank-one vector-field sum.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::laplacian::TwistedLaplacian;
use crate::perm::{cycles, for_each_restricted_permutation};
use crate::ring::{factorial, Scalar};
use crate::taudet::functional_cycles;
use crate::walks::canonical_rotation;
use crate::{Error, Result, DEFAULT_BUDGET};

/// Environment variable overriding the term budget.
pub const BUDGET_ENV: &str = "HOLODET_BUDGET";

/// The budget from `HOLODET_BUDGET`, or [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u128 {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

/// Which grouping of the factorial weight to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `Σ_{σ ∈ Σ(ξ)} Π_a (n_a − v_a(σ))! Π_{c ∈ C(σ)} (−Tr hol c)`.
    Standard,
    /// Permutations whose cycles are stationary or kinematic, weighted by
    /// their block-crossing cycles only.
    SigmaPrime,
    /// Pairs `(β, σ)` with `β ∈ Π_a S_{n_a}` permuting fixed points of `σ`.
    Beta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VectorFieldOptions {
    pub budget: u128,
    pub parallel: bool,
}

impl Default for VectorFieldOptions {
    fn default() -> Self {
        Self { budget: budget_from_env(), parallel: false }
    }
}

/// An ordered stack of edges: `ξ(i)` leaves block `bl(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeStack(pub Vec<usize>);

struct Slots {
    block: Vec<usize>,
    /// Slots of each block.
    members: Vec<Vec<usize>>,
    /// Out-edges of the block of each slot.
    choices: Vec<Vec<usize>>,
}

impl Slots {
    fn new<S: Scalar>(l: &TwistedLaplacian<S>) -> Self {
        let ranks = l.ranks();
        let block: Vec<usize> = ranks.iter().enumerate().flat_map(|(a, &k)| std::iter::repeat_n(a, k)).collect();
        let mut members = vec![Vec::new(); ranks.len()];
        for (i, &a) in block.iter().enumerate() {
            members[a].push(i);
        }
        let choices = block.iter().map(|&a| l.quiver().out_edges(a).collect()).collect();
        Self { block, members, choices }
    }

    fn stack_count(&self) -> u128 {
        self.choices.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
    }

    fn stack(&self, mut k: u128) -> EdgeStack {
        EdgeStack(
            self.choices
                .iter()
                .map(|c| {
                    let len = c.len() as u128;
                    let e = c[(k % len) as usize];
                    k /= len;
                    e
                })
                .collect(),
        )
    }

    /// `σ(i) = i` or `bl(σ(i)) = t(ξ(i))`.
    fn well_chained<S: Scalar>(&self, l: &TwistedLaplacian<S>, xi: &EdgeStack) -> Vec<Vec<usize>> {
        xi.0.iter()
            .enumerate()
            .map(|(i, &e)| {
                let mut a = vec![i];
                a.extend(&self.members[l.quiver().edge(e).tgt]);
                a
            })
            .collect()
    }
}

/// Upper estimate of elementary terms: `|Ξ| · min(n!, Π_i (1 + max n_{t(e)}))`,
/// times `Π n_a!` for the regrouped variants.
pub fn estimate_terms<S: Scalar>(l: &TwistedLaplacian<S>, variant: Variant) -> u128 {
    let slots = Slots::new(l);
    let ranks = l.ranks();
    let n = slots.block.len() as u64;
    let per_stack = slots
        .choices
        .iter()
        .map(|c| 1 + c.iter().map(|&e| ranks[l.quiver().edge(e).tgt]).max().unwrap_or(0) as u128)
        .fold(1u128, |acc, k| acc.saturating_mul(k))
        .min(factorial(n.min(20)) as u128);
    let extra = match variant {
        Variant::Standard => 1,
        Variant::SigmaPrime | Variant::Beta => ranks.iter().map(|&k| factorial(k as u64) as u128).product(),
    };
    slots.stack_count().saturating_mul(per_stack).saturating_mul(extra)
}

fn check_budget<S: Scalar>(l: &TwistedLaplacian<S>, variant: Variant, budget: u128) -> Result<()> {
    let terms = estimate_terms(l, variant);
    if terms > budget {
        let method = match variant {
            Variant::Standard => "vector fields",
            Variant::SigmaPrime => "vector fields (sigma-prime)",
            Variant::Beta => "vector fields (beta)",
        };
        return Err(Error::BudgetExceeded { method, terms, budget });
    }
    Ok(())
}

/// Block-preserving permutations of `slots`: slot `i` may go to any listed
/// slot of its own block.
fn within_blocks(slots: &Slots, free: &[bool]) -> Vec<Vec<usize>> {
    (0..free.len())
        .map(|i| {
            if free[i] {
                slots.members[slots.block[i]].iter().copied().filter(|&j| free[j]).collect()
            } else {
                vec![i]
            }
        })
        .collect()
}

fn stack_bracket<S: Scalar>(l: &TwistedLaplacian<S>, slots: &Slots, xi: &EdgeStack, variant: Variant) -> S {
    let q = l.source();
    let p = l.ranks().len();
    let mut traces: HashMap<Vec<usize>, S> = HashMap::new();
    let mut trace_of = |edges: Vec<usize>| -> S {
        let key = canonical_rotation(&edges);
        traces
            .entry(key)
            .or_insert_with_key(|k| k[1..].iter().fold(q.matrix(k[0]).clone(), |h, &e| h.mul(q.matrix(e))).trace())
            .clone()
    };
    // Π (−Tr hol c) over the moving cycles of σ, and the fixed-point mask
    let mut weigh = |sigma: &[usize]| -> (S, Vec<bool>) {
        let mut w = S::one();
        for c in cycles(sigma) {
            if c.len() >= 2 {
                w = w * -trace_of(c.iter().map(|&i| xi.0[i]).collect());
            }
        }
        (w, sigma.iter().enumerate().map(|(i, &j)| i == j).collect())
    };

    let mut bracket = S::zero();
    match variant {
        Variant::Standard => {
            for_each_restricted_permutation(&slots.well_chained(l, xi), |sigma| {
                let (w, fixed) = weigh(sigma);
                let mut free = vec![0u64; p];
                for (i, f) in fixed.iter().enumerate() {
                    if *f {
                        free[slots.block[i]] += 1;
                    }
                }
                let mult = free.iter().map(|&k| factorial(k)).product::<u64>();
                bracket = bracket.clone() + w.mul_int(mult as i64);
            });
        }
        Variant::SigmaPrime => {
            // each σ' is a kinematic part σ completed by a stationary
            // permutation of σ's fixed points
            for_each_restricted_permutation(&slots.well_chained(l, xi), |sigma| {
                let (w, fixed) = weigh(sigma);
                for_each_restricted_permutation(&within_blocks(slots, &fixed), |_stationary| {
                    bracket = bracket.clone() + w.clone();
                });
            });
        }
        Variant::Beta => {
            let all = vec![true; slots.block.len()];
            let allowed = slots.well_chained(l, xi);
            for_each_restricted_permutation(&within_blocks(slots, &all), |beta| {
                let restricted: Vec<Vec<usize>> =
                    allowed.iter().enumerate().map(|(i, a)| if beta[i] == i { a.clone() } else { vec![i] }).collect();
                for_each_restricted_permutation(&restricted, |sigma| {
                    bracket = bracket.clone() + weigh(sigma).0;
                });
            });
        }
    }
    bracket
}

/// `(1/Π n_a!) Σ_{ξ ∈ Ξ} x^ξ [bracket(ξ)]` for the chosen variant.
pub fn det_vector_fields_with<S: Scalar>(
    l: &TwistedLaplacian<S>,
    variant: Variant,
    opts: VectorFieldOptions,
) -> Result<S> {
    check_budget(l, variant, opts.budget)?;
    let slots = Slots::new(l);
    let q = l.source();
    let count = slots.stack_count();
    let term = |k: u128| {
        let xi = slots.stack(k);
        let x = xi.0.iter().fold(S::one(), |acc, &e| acc * q.weight(e).clone());
        let b = stack_bracket(l, &slots, &xi, variant);
        if b.is_zero() {
            S::zero()
        } else {
            x * b
        }
    };
    // the budget keeps `count` well inside u64
    let terms: Vec<S> = if opts.parallel {
        (0..count as u64).into_par_iter().map(|k| term(k as u128)).collect()
    } else {
        (0..count).map(term).collect()
    };
    let total = terms.into_iter().fold(S::zero(), |acc, t| acc + t);
    let denom: u64 = l.ranks().iter().map(|&k| factorial(k as u64)).product();
    Ok(total.int_div(denom))
}

/// Sum over stacks of edges and well-chained permutations, with the budget
/// from the environment.
pub fn det_vector_fields<S: Scalar>(l: &TwistedLaplacian<S>) -> Result<S> {
    det_vector_fields_with(l, Variant::Standard, VectorFieldOptions::default())
}

pub fn det_vector_fields_variant<S: Scalar>(l: &TwistedLaplacian<S>, variant: Variant) -> Result<S> {
    det_vector_fields_with(l, variant, VectorFieldOptions::default())
}

/// All ranks one: `Σ_F x^F Π_{c ∈ C(F)} (1 − hol(c))` over edge sets with
/// exactly one edge leaving each vertex.
pub fn det_forman_classic<S: Scalar>(l: &TwistedLaplacian<S>) -> Result<S> {
    if let Some(a) = l.ranks().iter().position(|&k| k != 1) {
        return Err(Error::Assumption(format!("vertex {} has rank {}, expected 1", a + 1, l.ranks()[a])));
    }
    let q = l.source();
    let p = l.ranks().len();
    let out: Vec<Vec<usize>> = (0..p).map(|a| q.quiver.out_edges(a).collect()).collect();
    if out.iter().any(|o| o.is_empty()) {
        return Ok(S::zero());
    }
    let mut total = S::zero();
    let mut choice = vec![0usize; p];
    loop {
        let f: Vec<usize> = (0..p).map(|a| out[a][choice[a]]).collect();
        let mut term = f.iter().fold(S::one(), |acc, &e| acc * q.weight(e).clone());
        for cyc in functional_cycles(&f, |e| q.quiver.edge(e).tgt, |e| q.quiver.edge(e).src) {
            let h = cyc.iter().fold(S::one(), |acc, &e| acc * q.matrix(e).get(0, 0).clone());
            term = term * (S::one() - h);
        }
        total = total + term;
        let mut a = 0;
        while a < p {
            choice[a] += 1;
            if choice[a] < out[a].len() {
                break;
            }
            choice[a] = 0;
            a += 1;
        }
        if a == p {
            break;
        }
    }
    Ok(total)
}
