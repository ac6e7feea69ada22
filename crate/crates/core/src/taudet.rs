//! τ-determinants of matrices whose entries are words over block symbols.
//!
//! For a central map τ,
//! `det_τ(M) = Σ_σ ε(σ) Π_{cycles (i1 … ir) of σ} τ(M_{i1 i2} M_{i2 i3} ··· M_{ir i1})`.
//! The trace-determinant of a block matrix is the case where a letter
//! `[a b]` stands for the block `A_[ab]` and τ is the trace.

use std::collections::HashMap;

use crate::linalg::{det_oracle, BlockMatrix, OracleDet};
use crate::perm::{cycles, for_each_permutation};
use crate::quiver::QuiverRep;
use crate::ring::Scalar;
use crate::walks::canonical_rotation;
use crate::{Error, Result};

/// Largest size accepted by [`det_tau`].
pub const TAU_DET_MAX: usize = 7;

/// Element of the free monoid on letters `[a b]`, or the zero word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TauWord {
    letters: Vec<(usize, usize)>,
    zero: bool,
}

impl TauWord {
    pub fn one() -> Self {
        Self { letters: Vec::new(), zero: false }
    }

    pub fn zero() -> Self {
        Self { letters: Vec::new(), zero: true }
    }

    pub fn letter(a: usize, b: usize) -> Self {
        Self { letters: vec![(a, b)], zero: false }
    }

    pub fn from_letters(letters: Vec<(usize, usize)>) -> Self {
        Self { letters, zero: false }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn letters(&self) -> &[(usize, usize)] {
        &self.letters
    }

    pub fn concat(&self, other: &TauWord) -> TauWord {
        if self.zero || other.zero {
            return TauWord::zero();
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        TauWord { letters, zero: false }
    }

    /// Rotation class representative; τ only depends on it.
    fn canonical(&self) -> TauWord {
        if self.zero || self.letters.is_empty() {
            return self.clone();
        }
        let code: Vec<usize> = self.letters.iter().map(|&(a, b)| a * 1_000_003 + b).collect();
        let rot = canonical_rotation(&code);
        let shift = (0..code.len()).find(|&r| (0..code.len()).all(|i| code[(r + i) % code.len()] == rot[i])).unwrap();
        let k = self.letters.len();
        TauWord { letters: (0..k).map(|i| self.letters[(shift + i) % k]).collect(), zero: false }
    }
}

/// A central map on words.
pub trait TauContext<S> {
    fn tau(&self, w: &TauWord) -> S;
    /// `τ(1)`.
    fn tau_one(&self) -> S;
}

/// Letters are the blocks of a block matrix and τ is the trace. Products
/// whose inner dimensions do not match evaluate to 0; `τ(1)` is the declared
/// unit trace.
pub struct BlockTrace<'a, S> {
    a: &'a BlockMatrix<S>,
    unit: S,
}

impl<'a, S: Scalar> BlockTrace<'a, S> {
    pub fn new(a: &'a BlockMatrix<S>, unit: S) -> Self {
        Self { a, unit }
    }
}

impl<S: Scalar> TauContext<S> for BlockTrace<'_, S> {
    fn tau(&self, w: &TauWord) -> S {
        if w.is_zero() {
            return S::zero();
        }
        let sizes = self.a.partition();
        let letters = w.letters();
        if letters.is_empty() {
            return self.unit.clone();
        }
        let k = letters.len();
        for i in 0..k {
            let (_, b) = letters[i];
            let (c, _) = letters[(i + 1) % k];
            if sizes[b] != sizes[c] {
                return S::zero();
            }
        }
        let mut prod = self.a.block(letters[0].0, letters[0].1);
        for &(a, b) in &letters[1..] {
            prod = prod.mul(&self.a.block(a, b));
        }
        prod.trace()
    }

    fn tau_one(&self) -> S {
        self.unit.clone()
    }
}

/// `det_τ(M)` for a square array of words; memoises τ on rotation classes.
pub fn det_tau<S: Scalar>(m: &[Vec<TauWord>], ctx: &impl TauContext<S>) -> Result<S> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::NotSquare { rows: n, cols: m.first().map_or(0, Vec::len) });
    }
    if n > TAU_DET_MAX {
        return Err(Error::SizeRefused { method: "tau-determinant", n, bound: TAU_DET_MAX });
    }
    let mut memo: HashMap<TauWord, S> = HashMap::new();
    let mut total = S::zero();
    for_each_permutation(n, |perm, sign| {
        let mut term = S::one();
        for cyc in cycles(perm) {
            let mut w = TauWord::one();
            for (k, &i) in cyc.iter().enumerate() {
                w = w.concat(&m[i][cyc[(k + 1) % cyc.len()]]);
            }
            if w.is_zero() {
                term = S::zero();
                break;
            }
            let key = w.canonical();
            let t = memo.entry(key).or_insert_with_key(|k| ctx.tau(k)).clone();
            term = term * t;
            if term.is_zero() {
                break;
            }
        }
        if !term.is_zero() {
            total = if sign > 0 { total.clone() + term } else { total.clone() - term };
        }
    });
    Ok(total)
}

/// The word matrix `A^□` with `(A^□)_{ij} = [bl(i) bl(j)]`.
pub fn box_matrix<S: Scalar>(a: &BlockMatrix<S>) -> Vec<Vec<TauWord>> {
    let n = a.size();
    (0..n).map(|i| (0..n).map(|j| TauWord::letter(a.block_of(i), a.block_of(j))).collect()).collect()
}

/// Both sides of the `τ(1) = N` identity for a rank-`N` representation.
#[derive(Clone, Debug, PartialEq)]
pub struct TauTraceReport<S> {
    /// `det_τ` of the `p × p` matrix of `N × N` Laplacian blocks, τ = trace.
    pub lhs_tau: S,
    /// `Σ_F x^F Π_{c ∈ C(F)} (1 − Tr hol(c))` over maps choosing one outgoing
    /// edge per vertex.
    pub rhs_vector_fields: S,
    /// Ordinary determinant of the Laplacian, for comparison.
    pub det_oracle: S,
    pub agree: bool,
}

/// Evaluates the `τ(1) = N` identity with τ the matrix trace, reading the
/// forest index set as the set of maps giving one outgoing edge per vertex.
/// Reports rather than asserts.
pub fn tau_trace_forest_check<S: OracleDet>(q: &QuiverRep<S>, n: usize) -> Result<TauTraceReport<S>> {
    if q.ranks().iter().any(|&r| r != n) {
        return Err(Error::Assumption(format!("every rank must equal N = {n}")));
    }
    let p = q.quiver.vertex_count();
    let lap = crate::laplacian::build_laplacian(q)?;
    // one block per vertex, letters index vertices
    let words: Vec<Vec<TauWord>> = (0..p).map(|u| (0..p).map(|v| TauWord::letter(u, v)).collect()).collect();
    let ctx = BlockTrace::new(lap.matrix(), S::from_i64(n as i64));
    let lhs_tau = det_tau(&words, &ctx)?;

    let out: Vec<Vec<usize>> = (0..p).map(|a| q.quiver.out_edges(a).collect()).collect();
    let mut rhs = S::zero();
    if out.iter().all(|o| !o.is_empty()) {
        let mut choice = vec![0usize; p];
        loop {
            let f: Vec<usize> = (0..p).map(|a| out[a][choice[a]]).collect();
            let mut term = crate::ring::product(f.iter().map(|&e| q.weight(e).clone()));
            for cyc in functional_cycles(&f, |e| q.quiver.edge(e).tgt, |e| q.quiver.edge(e).src) {
                let mut h = q.matrix(cyc[0]).clone();
                for &e in &cyc[1..] {
                    h = h.mul(q.matrix(e));
                }
                term = term * (S::one() - h.trace());
            }
            rhs = rhs + term;
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
    }
    let det = det_oracle(lap.matrix().matrix())?;
    let agree = lhs_tau.approx_eq(&rhs);
    Ok(TauTraceReport { lhs_tau, rhs_vector_fields: rhs, det_oracle: det, agree })
}

/// Cycles of the functional graph given by `f[a]` = edge chosen at vertex `a`,
/// as edge sequences.
pub(crate) fn functional_cycles(
    f: &[usize],
    tgt: impl Fn(usize) -> usize,
    src: impl Fn(usize) -> usize,
) -> Vec<Vec<usize>> {
    let p = f.len();
    let mut state = vec![0u8; p]; // 0 new, 1 on current path, 2 done
    let mut out = Vec::new();
    for start in 0..p {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = tgt(f[v]);
        }
        if state[v] == 1 {
            let pos = path.iter().position(|&u| u == v).unwrap();
            let cyc: Vec<usize> = path[pos..].iter().map(|&u| f[u]).collect();
            debug_assert!(cyc.iter().all(|&e| path.contains(&src(e))));
            out.push(cyc);
        }
        for u in path {
            state[u] = 2;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::quiver::{Edge, EdgeWeights, Quiver, Representation};
    use crate::ring::{GaussianRational, IndeterminateSet, MultiPoly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Q = GaussianRational;

    fn random_block(rng: &mut ChaCha8Rng, partition: Vec<usize>) -> BlockMatrix<Q> {
        let n = partition.iter().sum();
        let m = Matrix::from_fn(n, n, |_, _| crate::quiver::random_gaussian_rational(rng));
        BlockMatrix::new(m, partition).unwrap()
    }

    /// Letters are 1×1 blocks holding the scalar entries.
    fn scalar_ctx(m: &Matrix<Q>) -> BlockMatrix<Q> {
        BlockMatrix::new(m.clone(), vec![1; m.rows()]).unwrap()
    }

    #[test]
    fn single_entry_and_zero() {
        let m = Matrix::from_rows(vec![vec![Q::from_i64(5)]]).unwrap();
        let a = scalar_ctx(&m);
        let ctx = BlockTrace::new(&a, Q::one());
        assert_eq!(det_tau(&[vec![TauWord::letter(0, 0)]], &ctx).unwrap(), Q::from_i64(5));
        let zeros = vec![vec![TauWord::zero(); 3]; 3];
        assert_eq!(det_tau(&zeros, &ctx).unwrap(), Q::zero());
    }

    #[test]
    fn scalar_letters_give_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=5 {
            let a = random_block(&mut rng, vec![1; n]);
            let ctx = BlockTrace::new(&a, Q::one());
            let words: Vec<Vec<TauWord>> = (0..n).map(|i| (0..n).map(|j| TauWord::letter(i, j)).collect()).collect();
            assert_eq!(det_tau(&words, &ctx).unwrap(), det_oracle(a.matrix()).unwrap());
        }
    }

    #[test]
    fn box_matrix_gives_factorial_multiple() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for partition in [vec![2, 1], vec![1, 2, 1], vec![3], vec![2, 2]] {
            let a = random_block(&mut rng, partition.clone());
            let ctx = BlockTrace::new(&a, Q::one());
            let lhs = det_tau(&box_matrix(&a), &ctx).unwrap();
            let fact: i64 = partition.iter().map(|&k| (1..=k as i64).product::<i64>()).product();
            assert_eq!(lhs, det_oracle(a.matrix()).unwrap().mul_int(fact));
        }
    }

    #[test]
    fn size_refusal() {
        let a = BlockMatrix::new(Matrix::<Q>::identity(8), vec![8]).unwrap();
        let ctx = BlockTrace::new(&a, Q::one());
        assert!(matches!(det_tau(&box_matrix(&a), &ctx), Err(Error::SizeRefused { .. })));
    }

    #[test]
    fn trace_is_central_on_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_block(&mut rng, vec![2, 1, 2]);
        let ctx = BlockTrace::new(&a, Q::from_i64(2));
        let random_word = |rng: &mut ChaCha8Rng| {
            let len = rng.random_range(1..=4);
            TauWord::from_letters((0..len).map(|_| (rng.random_range(0..3), rng.random_range(0..3))).collect())
        };
        for _ in 0..100 {
            let w1 = random_word(&mut rng);
            let w2 = random_word(&mut rng);
            assert_eq!(ctx.tau(&w1.concat(&w2)), ctx.tau(&w2.concat(&w1)));
        }
        // mismatched inner dimensions
        assert_eq!(ctx.tau(&TauWord::from_letters(vec![(0, 1), (0, 0)])), Q::zero());
        assert_eq!(ctx.tau(&TauWord::one()), Q::from_i64(2));
    }

    fn bidirected_edge(n: usize, u: Matrix<Q>) -> (QuiverRep<MultiPoly<Q>>, IndeterminateSet) {
        let set = IndeterminateSet::from_names(["x", "y"]).unwrap();
        let q = Quiver::new(2, vec![Edge { id: "e".into(), src: 0, tgt: 1 }, Edge { id: "f".into(), src: 1, tgt: 0 }])
            .with_involution(vec![(0, 1)]);
        let lift = |m: &Matrix<Q>| m.map(|c| MultiPoly::constant(c.clone()));
        let inv = u.inverse().unwrap();
        let rep = Representation { ranks: vec![n, n], matrices: vec![lift(&u), lift(&inv)] };
        let w = EdgeWeights(vec![MultiPoly::var(0), MultiPoly::var(1)]);
        (QuiverRep::new(q, rep, w).unwrap(), set)
    }

    #[test]
    fn rank_one_reduces_to_forman() {
        let u = Matrix::from_rows(vec![vec![Q::from_ratio(3, 5) + Q::from_ratio(4, 5) * Q::i()]]).unwrap();
        let (q, _) = bidirected_edge(1, u);
        let report = tau_trace_forest_check(&q, 1).unwrap();
        assert!(report.agree);
        assert_eq!(report.lhs_tau, report.det_oracle);
    }

    #[test]
    fn rank_two_identity_connection() {
        // a single bidirected edge with trivial holonomy: the Laplacian has
        // the constant kernel, but the τ-determinant does not vanish
        let (q, set) = bidirected_edge(2, Matrix::identity(2));
        let report = tau_trace_forest_check(&q, 2).unwrap();
        let show = |p: &MultiPoly<Q>| p.display(&set, |c| c.to_string());
        assert_eq!(show(&report.det_oracle), "0");
        assert_eq!(show(&report.lhs_tau), "2*x*y");
        assert_eq!(show(&report.rhs_vector_fields), "-x*y");
        assert!(!report.agree);
    }

    #[test]
    fn random_unitary_two_cycle_is_reported() {
        use num_complex::Complex64;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = crate::quiver::haar_like_unitary(2, &mut rng);
        let q = Quiver::from_pairs(2, &[(0, 1), (1, 0)]).with_involution(vec![(0, 1)]);
        let rep = Representation { ranks: vec![2, 2], matrices: vec![u.clone(), u.adjoint()] };
        let w = EdgeWeights(vec![Complex64::new(1.5, 0.0), Complex64::new(0.5, 0.0)]);
        let q = QuiverRep::new(q, rep, w).unwrap();
        let report = tau_trace_forest_check(&q, 2).unwrap();
        // trivial holonomy u u* = I makes the ordinary determinant vanish
        assert!(report.det_oracle.norm() < 1e-12);
        assert!(report.lhs_tau.is_finite() && report.rhs_vector_fields.is_finite());
    }
}
