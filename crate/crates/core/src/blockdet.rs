//! Determinant identities for abstract block matrices: permutation-trace
//! sums, the trace-determinant, the cycle-multiset expansion for scalar
//! diagonal blocks (plain, integral, characteristic polynomial) and the
//! truncated Euler product.

use std::collections::HashMap;

use crate::linalg::{det_oracle, walk_trace, BlockMatrix, Matrix, OracleDet};
use crate::perm::{cycles, for_each_permutation};
use crate::ring::{factorial, Field, Monomial, MultiPoly, Scalar};
use crate::taudet::{box_matrix, det_tau, BlockTrace, TAU_DET_MAX};
use crate::walks::{candidate_walks, CycleLike, CycleMultiset, CyclicWalk, MultisetStream};
use crate::{Error, Result};

pub use crate::taudet::TauWord;

/// Largest size accepted by the `n!` permutation sums.
pub const PERM_SUM_MAX: usize = 8;

/// Tolerance for the scalar-diagonal check on floats, relative to `|z_a|`.
pub const DIAGONAL_TOL: f64 = 1e-12;

fn check_size(method: &'static str, n: usize, bound: usize) -> Result<()> {
    if n > bound {
        Err(Error::SizeRefused { method, n, bound })
    } else {
        Ok(())
    }
}

fn block_factorials(partition: &[usize]) -> u64 {
    partition.iter().map(|&k| factorial(k as u64)).product()
}

/// `(1/n!) Σ_σ ε(σ) Π_{cycles c of σ} Tr(M^{|c|})`.
pub fn det_perm_traces<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    check_size("permutation-trace determinant", n, PERM_SUM_MAX)?;
    let mut traces = vec![S::zero(); n + 1];
    let mut power = Matrix::identity(n);
    for tr in traces.iter_mut().skip(1) {
        power = power.mul(m);
        *tr = power.trace();
    }
    let mut total = S::zero();
    for_each_permutation(n, |perm, sign| {
        let term = cycles(perm).iter().fold(S::one(), |acc, c| acc * traces[c.len()].clone());
        total = total.clone() + term.mul_int(sign);
    });
    Ok(total.int_div(factorial(n as u64)))
}

/// `Σ_σ ε(σ) Π_{cycles} Tr(A_[bl(i1)bl(i2)] ··· A_[bl(ir)bl(i1)])`, the
/// trace-determinant `det_Tr(A^□)`.
fn block_perm_sum<S: Scalar>(a: &BlockMatrix<S>) -> S {
    let mut memo: HashMap<Vec<usize>, S> = HashMap::new();
    let mut total = S::zero();
    for_each_permutation(a.size(), |perm, sign| {
        let mut term = S::one();
        for c in cycles(perm) {
            let blocks: Vec<usize> = c.iter().map(|&i| a.block_of(i)).collect();
            let key = crate::walks::canonical_rotation(&blocks);
            let tr = memo.entry(key).or_insert_with_key(|k| walk_trace(a, k)).clone();
            term = term * tr;
            if term.is_zero() {
                return;
            }
        }
        total = total.clone() + term.mul_int(sign);
    });
    total
}

/// `(1/Π n_a!) Σ_σ ε(σ) Π_{cycles} Tr(A_[bl(i1)bl(i2)] ··· A_[bl(ir)bl(i1)])`.
pub fn det_block_perm<S: Scalar>(a: &BlockMatrix<S>) -> Result<S> {
    check_size("block permutation-trace determinant", a.size(), PERM_SUM_MAX)?;
    Ok(block_perm_sum(a).int_div(block_factorials(a.partition())))
}

/// `det_Tr(A^□) / Π n_a!`, with the trace-determinant evaluated on words.
pub fn det_trace_formal<S: Scalar>(a: &BlockMatrix<S>) -> Result<S> {
    check_size("trace-determinant", a.size(), TAU_DET_MAX)?;
    let ctx = BlockTrace::new(a, S::one());
    let dt = det_tau(&box_matrix(a), &ctx)?;
    Ok(dt.int_div(block_factorials(a.partition())))
}

/// Block matrix whose diagonal blocks are `z_a·I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarDiagBlockMatrix<S> {
    a: BlockMatrix<S>,
    z: Vec<S>,
}

impl<S: Scalar> ScalarDiagBlockMatrix<S> {
    /// Fails with the (1-based) index of the first non-scalar diagonal block.
    pub fn new(a: BlockMatrix<S>) -> Result<Self> {
        let mut z = Vec::with_capacity(a.num_blocks());
        for b in 0..a.num_blocks() {
            let d = a.block(b, b);
            let za = d.get(0, 0).clone();
            let scale = za.to_complex().map_or(0.0, |c| c.norm());
            let close = |x: &S, y: &S| match (S::EXACT, x.to_complex(), y.to_complex()) {
                (false, Some(u), Some(v)) => (u - v).norm() <= DIAGONAL_TOL * scale,
                _ => x == y,
            };
            let ok = (0..d.rows()).all(|i| {
                (0..d.cols()).all(|j| {
                    let want = if i == j { za.clone() } else { S::zero() };
                    close(d.get(i, j), &want)
                })
            });
            if !ok {
                return Err(Error::NonScalarDiagonal { block: b + 1 });
            }
            z.push(za);
        }
        Ok(Self { a, z })
    }

    pub fn matrix(&self) -> &BlockMatrix<S> {
        &self.a
    }

    pub fn z(&self) -> &[S] {
        &self.z
    }

    fn adjacency(&self) -> impl Fn(usize, usize) -> bool + '_ {
        move |x, y| !self.a.block(x, y).is_zero()
    }

    /// Multisets of cyclic walks through nonzero blocks with `v(C) ≤ n`.
    /// Walks crossing a zero block have zero weight and are skipped.
    pub fn multisets(&self) -> MultisetStream<CyclicWalk> {
        let bound = self.a.partition().to_vec();
        let p = self.a.num_blocks();
        MultisetStream::new(candidate_walks(p, &bound, self.adjacency()), p, &bound)
    }

    /// `−W(−A, c) = −(−1)^{|c|} W(A, c)`.
    pub fn walk_weight(&self, c: &CyclicWalk) -> S {
        let w = walk_trace(&self.a, c);
        if c.len().is_multiple_of(2) {
            -w
        } else {
            w
        }
    }
}

/// `Π_a z_a^{e_a}`.
pub(crate) fn z_power<S: Scalar>(z: &[S], exps: impl IntoIterator<Item = usize>) -> S {
    z.iter().zip(exps).fold(S::one(), |acc, (za, e)| if e == 0 { acc } else { acc * za.pow(e as u32) })
}

fn as_u64(v: u128, what: &str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::Invariant(format!("{what} overflows 64 bits")))
}

/// One term of a cycle-multiset expansion, before division by
/// `C!·Π val(c)`: `Π_{c∈C} weight(c)`.
pub(crate) fn multiset_product<T: CycleLike + std::hash::Hash, S: Scalar>(
    c: &CycleMultiset<T>,
    weight: &HashMap<T, S>,
) -> S {
    c.items().iter().fold(S::one(), |acc, (cy, m)| acc * weight[cy].pow(*m as u32))
}

/// Folds `Σ_C f(C) · Π weight(c) / (C!·Π val)` over a multiset stream.
pub(crate) fn fold_expansion<T, S>(
    stream: MultisetStream<T>,
    weight: impl Fn(&T) -> S,
    mut f: impl FnMut(&CycleMultiset<T>) -> S,
) -> Result<S>
where
    T: CycleLike + std::hash::Hash,
    S: Scalar,
{
    let weights: HashMap<T, S> = stream.candidates().iter().map(|c| (c.clone(), weight(c))).collect();
    let mut total = S::zero();
    for c in stream {
        let w = multiset_product(&c, &weights);
        if w.is_zero() {
            continue;
        }
        let denom = as_u64(c.factorial() * c.valuation_product(), "multiset coefficient")?;
        total = total + (f(&c) * w).int_div(denom);
    }
    Ok(total)
}

/// `Σ_{C ∈ CMS≤n} z^{n−v(C)}/C! · Π_{c∈C} (−W(−A,c))/val(c)`.
pub fn det_scalar_diag<S: Scalar>(a: &ScalarDiagBlockMatrix<S>) -> Result<S> {
    let n = a.matrix().partition().to_vec();
    let p = n.len();
    fold_expansion(
        a.multisets(),
        |c| a.walk_weight(c),
        |c| z_power(a.z(), c.visits(p).iter().zip(&n).map(|(v, na)| na - v)),
    )
}

/// `Π n_a! / (C!·Π val(c))`, checked to be an integer.
pub fn integral_coefficient<T: CycleLike>(partition: &[usize], c: &CycleMultiset<T>) -> Result<u128> {
    let num = block_factorials(partition) as u128;
    let den = c.factorial() * c.valuation_product();
    if !num.is_multiple_of(den) {
        return Err(Error::Invariant(format!("coefficient {num}/{den} is not an integer")));
    }
    Ok(num / den)
}

/// Evaluates `Π n_a! · det A` with integer coefficients, then divides.
pub fn det_scalar_diag_integral<S: Scalar>(a: &ScalarDiagBlockMatrix<S>) -> Result<S> {
    let n = a.matrix().partition().to_vec();
    let p = n.len();
    let stream = a.multisets();
    let weights: HashMap<CyclicWalk, S> = stream.candidates().iter().map(|c| (c.clone(), a.walk_weight(c))).collect();
    let mut total = S::zero();
    for c in stream {
        let coeff = integral_coefficient(&n, &c)?;
        let coeff = i64::try_from(coeff).map_err(|_| Error::Invariant("coefficient overflows".into()))?;
        let zp = z_power(a.z(), c.visits(p).iter().zip(&n).map(|(v, na)| na - v));
        total = total + (zp * multiset_product(&c, &weights)).mul_int(coeff);
    }
    Ok(total.int_div(block_factorials(&n)))
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

/// `Σ_{k ≤ m} binom(m, k) z^{m−k} t_a^k` as a polynomial in the shift
/// variable with index `a`.
pub(crate) fn binomial_shift<S: Scalar>(z: &S, m: usize, a: usize) -> MultiPoly<S> {
    (0..=m).fold(MultiPoly::zero(), |acc, k| {
        let mut exps = vec![0u32; a + 1];
        exps[a] = k as u32;
        acc + MultiPoly::monomial(Monomial::new(exps), z.pow((m - k) as u32).mul_int(binomial(m, k)))
    })
}

/// `det(T + A)` with `T = diag(t_a I)`, as a polynomial in `t_1, …, t_p`
/// (variable indices `0..p`):
/// `Σ_k t^k Σ_{C: v(C)+k ≤ n} Π_a binom(n_a − v_a, k_a) z^{n−k−v}/C! Π (−W(−A,c))/val(c)`.
pub fn charpoly_block<S: Scalar>(a: &ScalarDiagBlockMatrix<S>) -> Result<MultiPoly<S>> {
    let n = a.matrix().partition().to_vec();
    let p = n.len();
    let lifted = |s: S| MultiPoly::constant(s);
    fold_expansion(
        a.multisets(),
        |c| lifted(a.walk_weight(c)),
        |c| {
            let v = c.visits(p);
            (0..p).fold(MultiPoly::one(), |acc, b| acc * binomial_shift(&a.z()[b], n[b] - v[b], b))
        },
    )
}

/// Collapses every shift variable to a single `t`; returns ascending
/// coefficients of length `n + 1`.
pub fn collapse_shifts<S: Scalar>(poly: &MultiPoly<S>, n: usize) -> Vec<S> {
    let mut out = vec![S::zero(); n + 1];
    for (m, c) in poly.terms() {
        let d = m.degree() as usize;
        out[d] = out[d].clone() + c.clone();
    }
    out
}

/// Result of [`block_euler_truncated`].
#[derive(Clone, Debug, PartialEq)]
pub struct EulerTruncation<S> {
    pub value: S,
    /// Number of prime walks included.
    pub factors: usize,
    /// The last visit level changed the value by at most `1e-9` relative
    /// (numeric embedding).
    pub converged: bool,
    /// `|value(cap) − value(cap − 1)|` in the numeric embedding.
    pub last_change: f64,
}

/// `hol(−A, π)`, based at the first block of the canonical rotation.
pub fn walk_holonomy<S: Scalar>(a: &BlockMatrix<S>, w: &CyclicWalk) -> Matrix<S> {
    let b = w.blocks();
    let k = b.len();
    let mut h = a.block(b[0], b[1 % k]).neg();
    for i in 1..k {
        h = h.mul(&a.block(b[i], b[(i + 1) % k]).neg());
    }
    h
}

/// `z^n · Π_{prime walks π, |π| ≤ cap} det(I − z^{−v(π)} hol(−A, π))`.
pub fn block_euler_truncated<S: Field + OracleDet>(
    a: &ScalarDiagBlockMatrix<S>,
    max_total_visits: usize,
) -> Result<EulerTruncation<S>> {
    let p = a.matrix().num_blocks();
    let n = a.matrix().partition();
    let z_inv: Vec<S> = a
        .z()
        .iter()
        .enumerate()
        .map(|(b, z)| z.inv().ok_or(Error::ZeroVertexWeight { vertex: b + 1 }))
        .collect::<Result<_>>()?;
    let mut primes: Vec<CyclicWalk> = crate::walks::walks_up_to(p, max_total_visits, a.adjacency())
        .into_iter()
        .filter(|w| w.valuation() == 1)
        .collect();
    primes.sort_by_key(|w| (w.len(), w.clone()));
    let mut value = z_power(a.z(), n.iter().copied());
    let mut previous = value.clone();
    for w in &primes {
        let h = walk_holonomy(a.matrix(), w);
        let scale = z_power(&z_inv, w.visits(p));
        let factor = Matrix::identity(h.rows()).sub(&h.scale(&scale));
        let d = det_oracle(&factor)?;
        if w.len() < max_total_visits {
            previous = previous * d.clone();
        }
        value = value * d;
    }
    let diff = match (value.to_complex(), previous.to_complex()) {
        (Some(x), Some(y)) => (x - y).norm(),
        _ => f64::NAN,
    };
    let scale = value.to_complex().map_or(1.0, |x| x.norm().max(1.0));
    Ok(EulerTruncation { value, factors: primes.len(), converged: diff <= 1e-9 * scale, last_change: diff })
}
