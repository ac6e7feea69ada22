//! The twisted Laplacian of a quiver representation and its cycle
//! expansions: determinant, characteristic polynomial, Wilson-loop moments
//! and the Cauchy–Binet splitting over edge selections.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::blockdet::{binomial_shift, fold_expansion, multiset_product, z_power, ScalarDiagBlockMatrix};
use crate::linalg::{det_oracle, BlockMatrix, Matrix, OracleDet};
use crate::quiver::{haar_like_unitary, Quiver, QuiverRep};
use crate::ring::{MultiPoly, Scalar};
use crate::walks::{enumerate_gcycle_multisets, CycleMultiset, GCycle, MultisetStream};
use crate::{Error, Result};

/// Largest support accepted by [`wilson_moment`].
pub const WILSON_SUPPORT_MAX: usize = 1 << 16;
/// Largest total rank accepted by [`cauchy_binet_decompose`].
pub const CAUCHY_BINET_MAX: usize = 6;

/// `Δ` as a block matrix, together with the data it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedLaplacian<S> {
    matrix: BlockMatrix<S>,
    z: Vec<S>,
    source: QuiverRep<S>,
}

impl<S: Scalar> TwistedLaplacian<S> {
    pub fn matrix(&self) -> &BlockMatrix<S> {
        &self.matrix
    }

    pub fn z(&self) -> &[S] {
        &self.z
    }

    pub fn source(&self) -> &QuiverRep<S> {
        &self.source
    }

    pub fn quiver(&self) -> &Quiver {
        &self.source.quiver
    }

    pub fn ranks(&self) -> &[usize] {
        self.source.ranks()
    }

    pub fn as_scalar_diag(&self) -> ScalarDiagBlockMatrix<S> {
        ScalarDiagBlockMatrix::new(self.matrix.clone()).expect("Laplacian diagonal blocks are scalar")
    }
}

/// Diagonal blocks `z_a I`, off-diagonal blocks `−Σ_{e: u→v} x_e U_e`.
pub fn build_laplacian<S: Scalar>(q: &QuiverRep<S>) -> Result<TwistedLaplacian<S>> {
    let z = q.z();
    let ranks = q.ranks().to_vec();
    let mut blocks: HashMap<(usize, usize), Matrix<S>> = HashMap::new();
    for (e, edge) in q.quiver.edges().iter().enumerate() {
        let term = q.matrix(e).scale(q.weight(e)).neg();
        blocks.entry((edge.src, edge.tgt)).and_modify(|b| *b = b.add(&term)).or_insert(term);
    }
    let matrix = BlockMatrix::from_blocks(ranks.clone(), |u, v| {
        if u == v {
            Matrix::scalar(ranks[u], z[u].clone())
        } else {
            blocks.get(&(u, v)).cloned().unwrap_or_else(|| Matrix::zeros(ranks[u], ranks[v]))
        }
    })?;
    Ok(TwistedLaplacian { matrix, z, source: q.clone() })
}

/// `U_{e1} ··· U_{ek}` along a cycle, based at its first edge.
pub fn holonomy<S: Scalar>(q: &QuiverRep<S>, c: &GCycle) -> Matrix<S> {
    let e = c.edges();
    e[1..].iter().fold(q.matrix(e[0]).clone(), |h, &f| h.mul(q.matrix(f)))
}

/// `Tr hol(c)` for a cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyTrace<S> {
    pub cycle: GCycle,
    pub value: S,
}

impl<S: Scalar> HolonomyTrace<S> {
    pub fn new(q: &QuiverRep<S>, cycle: GCycle) -> Self {
        let value = holonomy(q, &cycle).trace();
        Self { cycle, value }
    }
}

/// `x^{e(c)}`.
pub fn edge_monomial<S: Scalar>(q: &QuiverRep<S>, c: &GCycle) -> S {
    c.edges().iter().fold(S::one(), |acc, &e| acc * q.weight(e).clone())
}

fn cycle_multisets<S: Scalar>(l: &TwistedLaplacian<S>) -> MultisetStream<GCycle> {
    enumerate_gcycle_multisets(l.quiver(), l.ranks())
}

fn z_complement<S: Scalar>(l: &TwistedLaplacian<S>, c: &CycleMultiset<GCycle>) -> S {
    let v = c.visits(l.ranks().len());
    z_power(l.z(), l.ranks().iter().zip(v).map(|(n, v)| n - v))
}

/// `Σ_C z^{n−v(C)}/C! Π_{c∈C} (−x^{e(c)} Tr hol(c))/val(c)` over multisets of
/// cycles on the quiver.
pub fn det_laplacian_cycles<S: Scalar>(l: &TwistedLaplacian<S>) -> Result<S> {
    let q = l.source();
    fold_expansion(
        cycle_multisets(l),
        |c| -(edge_monomial(q, c) * HolonomyTrace::new(q, c.clone()).value),
        |c| z_complement(l, c),
    )
}

/// `det(T + Δ)` with `T = diag(t_a I)`, a polynomial in `t_1, …, t_p`
/// (variable indices `0..p`).
pub fn charpoly_laplacian<S: Scalar>(l: &TwistedLaplacian<S>) -> Result<MultiPoly<S>> {
    let q = l.source();
    let n = l.ranks();
    let p = n.len();
    fold_expansion(
        cycle_multisets(l),
        |c| MultiPoly::constant(-(edge_monomial(q, c) * HolonomyTrace::new(q, c.clone()).value)),
        |c| {
            let v = c.visits(p);
            (0..p).fold(MultiPoly::one(), |acc, a| acc * binomial_shift(&l.z()[a], n[a] - v[a], a))
        },
    )
}

/// A probability distribution on the matrices of a representation with
/// finitely many outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution<S> {
    outcomes: Vec<(S, Vec<Matrix<S>>)>,
}

impl<S: Scalar> FiniteDistribution<S> {
    pub fn new(outcomes: Vec<(S, Vec<Matrix<S>>)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Assumption("distribution has empty support".into()));
        }
        if outcomes.len() > WILSON_SUPPORT_MAX {
            return Err(Error::SizeRefused { method: "Wilson moment", n: outcomes.len(), bound: WILSON_SUPPORT_MAX });
        }
        let total = outcomes.iter().fold(S::zero(), |acc, (w, _)| acc + w.clone());
        if !total.approx_eq(&S::one()) {
            return Err(Error::Assumption("probabilities do not sum to 1".into()));
        }
        Ok(Self { outcomes })
    }

    pub fn point(matrices: Vec<Matrix<S>>) -> Self {
        Self { outcomes: vec![(S::one(), matrices)] }
    }

    /// Each `U_e` independent and uniform on `choices[e]`.
    pub fn uniform_product(choices: Vec<Vec<Matrix<S>>>) -> Result<Self> {
        let size = choices.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
        match size {
            Some(0) => return Err(Error::Assumption("an edge has no possible matrix".into())),
            Some(s) if s <= WILSON_SUPPORT_MAX => {}
            _ => {
                return Err(Error::SizeRefused {
                    method: "Wilson moment",
                    n: size.unwrap_or(usize::MAX),
                    bound: WILSON_SUPPORT_MAX,
                })
            }
        }
        let size = size.unwrap();
        let prob = S::one().int_div(size as u64);
        let mut outcomes = Vec::with_capacity(size);
        let mut idx = vec![0usize; choices.len()];
        loop {
            outcomes.push((prob.clone(), idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect()));
            let mut e = 0;
            while e < idx.len() {
                idx[e] += 1;
                if idx[e] < choices[e].len() {
                    break;
                }
                idx[e] = 0;
                e += 1;
            }
            if e == idx.len() {
                break;
            }
        }
        Self::new(outcomes)
    }

    pub fn outcomes(&self) -> &[(S, Vec<Matrix<S>>)] {
        &self.outcomes
    }
}

/// One nonzero term of the moment expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct WilsonTerm<S> {
    /// Indices into [`WilsonMoment::multisets`], one per factor.
    pub tuple: Vec<usize>,
    pub weight: S,
    pub wilson: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WilsonMoment<S> {
    /// `E[(det Δ)^k]` by enumeration of the support.
    pub lhs: S,
    /// Sum over `k`-tuples of multisets of weight times Wilson loop.
    pub rhs: S,
    pub multisets: Vec<CycleMultiset<GCycle>>,
    pub table: Vec<WilsonTerm<S>>,
}

/// Both sides of the moment identity
/// `E[(det Δ)^k] = Σ_{C_1..C_k} Π_i [z^{n−v(C_i)}/C_i! Π (−x^{e(c)})/val(c)] · E[Π_i Π Tr hol(c)]`.
/// The matrices of `q` are ignored; its quiver, ranks and weights are used.
pub fn wilson_moment<S: OracleDet>(
    q: &QuiverRep<S>,
    dist: &FiniteDistribution<S>,
    k: usize,
) -> Result<WilsonMoment<S>> {
    if k == 0 {
        return Err(Error::Assumption("moment order must be at least 1".into()));
    }
    let reps: Vec<QuiverRep<S>> =
        dist.outcomes().iter().map(|(_, m)| q.with_matrices(m.clone())).collect::<Result<_>>()?;
    let mut lhs = S::zero();
    for ((prob, _), r) in dist.outcomes().iter().zip(&reps) {
        let d = det_oracle(build_laplacian(r)?.matrix().matrix())?;
        lhs = lhs + prob.clone() * d.pow(k as u32);
    }

    let lap = build_laplacian(q)?;
    let stream = cycle_multisets(&lap);
    let cands = stream.candidates().to_vec();
    let multisets: Vec<CycleMultiset<GCycle>> = stream.collect();
    let edge_weights: HashMap<GCycle, S> = cands.iter().map(|c| (c.clone(), -edge_monomial(q, c))).collect();
    let weights: Vec<S> = multisets
        .iter()
        .map(|c| {
            let d = (c.factorial() * c.valuation_product()) as u64;
            (z_complement(&lap, c) * multiset_product(c, &edge_weights)).int_div(d)
        })
        .collect();
    // holonomy products per outcome and multiset
    let hols: Vec<Vec<S>> = reps
        .iter()
        .map(|r| {
            let traces: HashMap<GCycle, S> =
                cands.iter().map(|c| (c.clone(), HolonomyTrace::new(r, c.clone()).value)).collect();
            multisets.iter().map(|c| multiset_product(c, &traces)).collect()
        })
        .collect();

    let live: Vec<usize> = (0..multisets.len()).filter(|&i| !weights[i].is_zero()).collect();
    let mut rhs = S::zero();
    let mut table = Vec::new();
    let mut tuple = vec![0usize; k];
    if !live.is_empty() {
        loop {
            let idx: Vec<usize> = tuple.iter().map(|&t| live[t]).collect();
            let weight = idx.iter().fold(S::one(), |acc, &i| acc * weights[i].clone());
            let wilson =
                dist.outcomes().iter().zip(&hols).fold(S::zero(), |acc, ((prob, _), h)| {
                    acc + idx.iter().fold(prob.clone(), |x, &i| x * h[i].clone())
                });
            let term = weight.clone() * wilson.clone();
            if !term.is_zero() {
                rhs = rhs + term;
                table.push(WilsonTerm { tuple: idx, weight, wilson });
            }
            let mut i = 0;
            while i < k {
                tuple[i] += 1;
                if tuple[i] < live.len() {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    Ok(WilsonMoment { lhs, rhs, multisets, table })
}

/// Sample mean and standard error of a complex estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: Complex64,
    pub stderr: f64,
}

impl Estimate {
    fn from_samples(xs: &[Complex64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<Complex64>() / n;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Self { mean, stderr: (var / n).sqrt() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloMoment {
    pub samples: usize,
    pub lhs: Estimate,
    pub rhs: Estimate,
}

/// Monte Carlo estimate of both sides of the moment identity with every
/// `U_e` an independent Haar unitary. Needs `n_{s(e)} = n_{t(e)}` on every
/// edge. Not exact; meant for exploration only.
pub fn wilson_monte_carlo(q: &QuiverRep<Complex64>, k: usize, samples: usize, seed: u64) -> Result<MonteCarloMoment> {
    if k == 0 || samples == 0 {
        return Err(Error::Assumption("moment order and sample count must be positive".into()));
    }
    let ranks = q.ranks();
    if let Some(e) = q.quiver.edges().iter().find(|e| ranks[e.src] != ranks[e.tgt]) {
        return Err(Error::Assumption(format!("edge {} joins vertices of different rank", e.id)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lhs, mut rhs) = (Vec::with_capacity(samples), Vec::with_capacity(samples));
    for _ in 0..samples {
        let mats = q.quiver.edges().iter().map(|e| haar_like_unitary(ranks[e.src], &mut rng)).collect();
        let r = q.with_matrices(mats)?;
        let lap = build_laplacian(&r)?;
        lhs.push(det_oracle(lap.matrix().matrix())?.powu(k as u32));
        rhs.push(det_laplacian_cycles(&lap)?.powu(k as u32));
    }
    Ok(MonteCarloMoment { samples, lhs: Estimate::from_samples(&lhs), rhs: Estimate::from_samples(&rhs) })
}

/// One term of the Cauchy–Binet splitting.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyBinetTerm<S> {
    /// `I_e ⊆ 0..n_{s(e)}` for every edge, sorted.
    pub selection: Vec<Vec<usize>>,
    pub value: S,
}

/// One subset of basis indices per out-edge.
type Selection = Vec<Vec<usize>>;

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()).collect()
}

/// Tuples `(I_e)` over the out-edges of one vertex with `Σ |I_e| = n`.
fn vertex_selections(n: usize, edges: usize) -> Vec<Selection> {
    let all = subsets(n);
    let mut out = vec![(Vec::new(), 0usize)];
    for _ in 0..edges {
        out = out
            .into_iter()
            .flat_map(|(sel, used)| {
                all.iter()
                    .filter(move |s| used + s.len() <= n)
                    .map(move |s| {
                        let mut next: Vec<Vec<usize>> = sel.clone();
                        next.push(s.clone());
                        (next, used + s.len())
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out.into_iter().filter(|(_, used)| *used == n).map(|(sel, _)| sel).collect()
}

/// Splits `det Δ = det(∂ ∘ d)` over edge selections: `d f(e) = f(s(e)) −
/// U_e f(t(e))`, `∂ ω(v) = Σ_{s(e)=v} x_e ω(e)`, and each term is
/// `det(∂ ∘ proj_{⊕ C^{I_e}} ∘ d)` for `Σ_{s(e)=a} |I_e| = n_a`.
pub fn cauchy_binet_decompose<S: OracleDet>(l: &TwistedLaplacian<S>) -> Result<Vec<CauchyBinetTerm<S>>> {
    let q = l.source();
    let n = l.ranks();
    let total: usize = n.iter().sum();
    if total > CAUCHY_BINET_MAX {
        return Err(Error::SizeRefused { method: "Cauchy-Binet decomposition", n: total, bound: CAUCHY_BINET_MAX });
    }
    let edges = q.quiver.edges();
    let offset: Vec<usize> = n.iter().scan(0, |acc, &k| Some(std::mem::replace(acc, *acc + k))).collect();
    let per_vertex: Vec<(Vec<usize>, Vec<Selection>)> = (0..n.len())
        .map(|a| {
            let out: Vec<usize> = q.quiver.out_edges(a).collect();
            let sels = vertex_selections(n[a], out.len());
            (out, sels)
        })
        .collect();
    if per_vertex.iter().any(|(_, s)| s.is_empty()) {
        return Ok(Vec::new());
    }

    let mut terms = Vec::new();
    let mut idx = vec![0usize; n.len()];
    loop {
        let mut selection = vec![Vec::new(); edges.len()];
        for (a, (out, sels)) in per_vertex.iter().enumerate() {
            for (&e, s) in out.iter().zip(&sels[idx[a]]) {
                selection[e] = s.clone();
            }
        }
        // rows of ∂∘proj∘d: one per vertex coordinate, summing selected edge rows
        let mut m: Matrix<S> = Matrix::zeros(total, total);
        for (e, edge) in edges.iter().enumerate() {
            let x = q.weight(e);
            let u = q.matrix(e);
            for &i in &selection[e] {
                let row = offset[edge.src] + i;
                let v = m.get(row, row).clone() + x.clone();
                m.set(row, row, v);
                for j in 0..n[edge.tgt] {
                    let col = offset[edge.tgt] + j;
                    let v = m.get(row, col).clone() - x.clone() * u.get(i, j).clone();
                    m.set(row, col, v);
                }
            }
        }
        terms.push(CauchyBinetTerm { selection, value: det_oracle(&m)? });
        let mut a = 0;
        while a < idx.len() {
            idx[a] += 1;
            if idx[a] < per_vertex[a].1.len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
        if a == idx.len() {
            break;
        }
    }
    Ok(terms)
}
