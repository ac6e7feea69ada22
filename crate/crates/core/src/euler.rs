//! Euler products over prime cycles: the exact finite product, the truncated
//! product for sub-Markov weights with a certified error bound, and the
//! comparison with the untwisted Laplacian for unitary representations.

use num_complex::Complex64;
use petgraph::visit::{Bfs, Reversed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::blockdet::z_power;
use crate::laplacian::{build_laplacian, holonomy, TwistedLaplacian};
use crate::linalg::{det_oracle, reversed_charpoly, Matrix};
use crate::quiver::{haar_like_unitary, EdgeWeights, Quiver, QuiverRep, Representation};
use crate::ring::Scalar;
use crate::walks::{candidate_gcycles, prime_finiteness, GCycle, PrimeSet};
use crate::{Error, Result};

/// Slack on `‖U_e‖₂ ≤ 1`.
pub const NORM_SLACK: f64 = 1e-10;
/// Default target for the log-tail bound.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;
/// Default cap on prime length.
pub const DEFAULT_MAX_LEN: usize = 40;

/// `det(I − p^{e(c)} hol(c)) · Π_{a ∈ c} z_a^{n_a}` for a simple cycle,
/// expanded without division: `Σ_k c_k x^{k e(c)} Π_{a∈c} z_a^{n_a − k}`
/// where `det(I − sH) = Σ c_k s^k`.
fn simple_cycle_factor<S: Scalar>(l: &TwistedLaplacian<S>, c: &GCycle) -> Result<S> {
    let q = l.source();
    let n = l.ranks();
    let verts = c.vertices();
    let coeffs = reversed_charpoly(&holonomy(q, c))?;
    let x: S = c.edges().iter().fold(S::one(), |acc, &e| acc * q.weight(e).clone());
    let min_rank = verts.iter().map(|&a| n[a]).min().unwrap_or(0);
    let mut total = S::zero();
    for (k, ck) in coeffs.into_iter().enumerate() {
        // hol(c) factors through every C^{n_a} on the cycle
        if k > min_rank || ck.is_zero() {
            continue;
        }
        let z = verts.iter().fold(S::one(), |acc, &a| acc * l.z()[a].pow((n[a] - k) as u32));
        total = total + ck * x.pow(k as u32) * z;
    }
    Ok(total)
}

/// `z^n Π_{c prime} det(I − p^{e(c)} hol(c))`, `p_e = x_e / z_{s(e)}`, when
/// the prime cycles are finitely many (then simple and disjoint), in
/// division-free form.
pub fn det_euler_finite<S: Scalar>(l: &TwistedLaplacian<S>) -> Result<S> {
    let primes = match prime_finiteness(l.quiver()) {
        PrimeSet::Finite(p) => p,
        PrimeSet::Infinite => return Err(Error::InfinitePrimes),
    };
    let p = l.ranks().len();
    let mut on_cycle = vec![false; p];
    let mut value = S::one();
    for c in &primes {
        for &a in c.vertices() {
            on_cycle[a] = true;
        }
        value = value * simple_cycle_factor(l, c)?;
    }
    let rest = (0..p).map(|a| if on_cycle[a] { 0 } else { l.ranks()[a] });
    Ok(value * z_power(l.z(), rest))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerOptions {
    /// Stop once the log-tail bound drops below this.
    pub tol: f64,
    pub max_len: usize,
}

impl Default for EulerOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TAIL_TOL, max_len: DEFAULT_MAX_LEN }
    }
}

/// Weights and bounds of the sub-Markov walk.
#[derive(Clone, Debug, PartialEq)]
pub struct SubMarkovData {
    pub kappa: Vec<f64>,
    /// `p_e = x_e / (z_{s(e)} + κ_{s(e)})`.
    pub p: Vec<f64>,
    /// `‖U_e‖₂`.
    pub norms: Vec<f64>,
    /// `γ = ‖D⁻¹ Q D‖_∞` with `Q_ab = Σ_{e: a→b} p_e ‖U_e‖₂`; bounds the
    /// spectral radius of the block matrix `P`.
    pub gamma: f64,
}

/// Result of [`det_euler_truncated`].
#[derive(Clone, Debug, PartialEq)]
pub struct EulerTruncated {
    pub value: Complex64,
    /// Certified bound on `|value − det(diag(κ) + Δ)|`.
    pub error_bound: f64,
    /// Longest prime included.
    pub max_len: usize,
    pub primes: usize,
    /// Log-tail bound `n γ^{L+1} / ((L+1)(1−γ))`.
    pub tail: f64,
    pub data: SubMarkovData,
}

/// Largest singular value.
pub fn spectral_norm(u: &Matrix<Complex64>) -> f64 {
    let g = u.adjoint().mul(u);
    let k = g.rows();
    if k == 0 {
        return 0.0;
    }
    let mut v = vec![Complex64::new(1.0, 0.0); k];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w: Vec<Complex64> = (0..k).map(|i| (0..k).map(|j| g.get(i, j) * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|x| x / norm).collect();
        if (next - lambda).abs() <= 1e-15 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.sqrt()
}

/// Upper bound on `‖U‖₂`: the power-iteration estimate with a margin,
/// capped by the Frobenius norm.
fn spectral_norm_upper(u: &Matrix<Complex64>, estimate: f64) -> f64 {
    let frob = u.entries().iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    (estimate * (1.0 + 1e-9)).min(frob)
}

/// `d = (I − Q)⁻¹ 1` and `γ = max_a (Qd)_a / d_a`.
fn weighted_gamma(qm: &[Vec<f64>]) -> Option<f64> {
    let p = qm.len();
    let mut a: Vec<Vec<f64>> =
        (0..p).map(|i| (0..p).map(|j| if i == j { 1.0 } else { 0.0 } - qm[i][j]).chain([1.0]).collect()).collect();
    for col in 0..p {
        let piv = (col..p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..p {
            if r != col {
                let f = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * y;
                }
            }
        }
    }
    let d: Vec<f64> = (0..p).map(|i| a[i][p] / a[i][i]).collect();
    if d.iter().any(|&x| x.is_nan() || x <= 0.0 || !x.is_finite()) {
        return None;
    }
    let gamma = (0..p).map(|i| (0..p).map(|j| qm[i][j] * d[j]).sum::<f64>() / d[i]).fold(0.0, f64::max);
    // rounding margin
    Some(gamma * (1.0 + 1e-12) + 1e-15)
}

fn real_nonnegative(x: &Complex64, what: &str) -> Result<f64> {
    if x.im.abs() > 1e-12 * x.re.abs().max(1.0) || x.re < 0.0 {
        return Err(Error::Assumption(format!("{what} must be real and nonnegative, got {x}")));
    }
    Ok(x.re)
}

/// Checks the sub-Markov assumptions and computes `p_e` and `γ`.
pub fn sub_markov_data(l: &TwistedLaplacian<Complex64>, kappa: &[f64]) -> Result<SubMarkovData> {
    let q = l.source();
    let p = l.ranks().len();
    if kappa.len() != p {
        return Err(Error::Dimension(format!("{} kappa values for {p} vertices", kappa.len())));
    }
    if let Some(a) = kappa.iter().position(|k| k.is_nan() || *k < 0.0) {
        return Err(Error::Assumption(format!("kappa at vertex {} must be nonnegative", a + 1)));
    }
    let x: Vec<f64> =
        (0..q.quiver.edge_count()).map(|e| real_nonnegative(q.weight(e), "edge weight")).collect::<Result<_>>()?;
    let norms: Vec<f64> = (0..x.len()).map(|e| spectral_norm(q.matrix(e))).collect();
    if let Some(e) = norms.iter().position(|&s| s > 1.0 + NORM_SLACK) {
        return Err(Error::Assumption(format!("edge {} has operator norm {:.6} > 1", q.quiver.edge(e).id, norms[e])));
    }
    let z: Vec<f64> = l.z().iter().map(|z| z.re).collect();
    let pe: Vec<f64> = q
        .quiver
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| if x[e] == 0.0 { 0.0 } else { x[e] / (z[edge.src] + kappa[edge.src]) })
        .collect();
    let mut qm = vec![vec![0.0; p]; p];
    for (e, edge) in q.quiver.edges().iter().enumerate() {
        qm[edge.src][edge.tgt] += pe[e] * spectral_norm_upper(q.matrix(e), norms[e]);
    }
    let gamma = weighted_gamma(&qm).unwrap_or(f64::INFINITY);
    Ok(SubMarkovData { kappa: kappa.to_vec(), p: pe, norms, gamma })
}

/// Vertices that cannot reach a vertex with `κ > 0`.
fn unreachable_from_kappa(q: &Quiver, kappa: &[f64]) -> Vec<usize> {
    let g = q.digraph();
    let rev = Reversed(&g);
    let mut ok = vec![false; q.vertex_count()];
    for (b, _) in kappa.iter().enumerate().filter(|(_, k)| **k > 0.0) {
        let mut bfs = Bfs::new(rev, petgraph::graph::NodeIndex::new(b));
        while let Some(v) = bfs.next(rev) {
            ok[v.index()] = true;
        }
    }
    (0..ok.len()).filter(|&a| !ok[a]).collect()
}

/// `diag(κ) + Δ`.
pub fn shifted_laplacian(l: &TwistedLaplacian<Complex64>, kappa: &[f64]) -> Matrix<Complex64> {
    let m = l.matrix();
    let mut out = m.matrix().clone();
    for i in 0..m.size() {
        let v = out.get(i, i) + kappa[m.block_of(i)];
        out.set(i, i, v);
    }
    out
}

/// `(z + κ)^n Π_{c prime, |c| ≤ L} det(I − p^{e(c)} hol(c))`, increasing `L`
/// until the log-tail bound `n γ^{L+1}/((L+1)(1−γ))` is below `opts.tol`.
/// Approximates `det(diag(κ) + Δ)` with a certified error bound.
pub fn det_euler_truncated(
    l: &TwistedLaplacian<Complex64>,
    kappa: &[f64],
    opts: EulerOptions,
) -> Result<EulerTruncated> {
    let data = sub_markov_data(l, kappa)?;
    let q = l.source();
    let n = l.ranks();
    let total: usize = n.iter().sum();
    let finite = match prime_finiteness(&q.quiver) {
        PrimeSet::Finite(p) => Some(p),
        PrimeSet::Infinite => None,
    };
    let (primes, tail, max_len) = match finite {
        Some(primes) => {
            let len = primes.iter().map(|c| c.len()).max().unwrap_or(0);
            (primes, 0.0, len)
        }
        None => {
            let stuck = unreachable_from_kappa(&q.quiver, kappa);
            if !stuck.is_empty() {
                return Err(Error::Assumption(format!(
                    "vertex {} cannot reach a vertex with positive kappa",
                    stuck[0] + 1
                )));
            }
            if data.gamma.is_nan() || data.gamma >= 1.0 {
                return Err(Error::Assumption(format!(
                    "weighted norm bound {:.6} is not below 1; the walk is not sub-Markov",
                    data.gamma
                )));
            }
            let g = data.gamma;
            let bound = |len: usize| total as f64 * g.powi(len as i32 + 1) / ((len + 1) as f64 * (1.0 - g));
            let len = (1..=opts.max_len).find(|&len| bound(len) < opts.tol).unwrap_or(opts.max_len);
            let primes: Vec<GCycle> = candidate_gcycles(&q.quiver, &vec![len; n.len()], len)
                .into_iter()
                .filter(|c| c.valuation() == 1)
                .collect();
            (primes, bound(len), len)
        }
    };

    let shift: Vec<Complex64> = l.z().iter().zip(kappa).map(|(z, k)| z + k).collect();
    let mut value = z_power(&shift, n.iter().copied());
    for c in &primes {
        let weight: f64 = c.edges().iter().map(|&e| data.p[e]).product();
        let h = holonomy(q, c).scale(&Complex64::new(weight, 0.0));
        value *= det_oracle(&Matrix::identity(h.rows()).sub(&h))?;
    }
    let rounding = 1e-13 * (primes.len() as f64 + total as f64 + 1.0) * value.norm();
    let error_bound = value.norm() * tail.exp_m1() + rounding;
    Ok(EulerTruncated { value, error_bound, max_len, primes: primes.len(), tail, data })
}

/// Outcome of [`unitary_comparison_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryComparison {
    pub checks: usize,
    pub violations: usize,
    /// Smallest `det(t+Δ) / det(t+Δ0)^N` over checks whose denominator is
    /// above rounding level.
    pub min_ratio: f64,
}

fn require_bidirected(q: &Quiver, w: &[f64]) -> Result<()> {
    let m = q.edge_count();
    if w.len() != m {
        return Err(Error::Dimension(format!("{} weights for {m} edges", w.len())));
    }
    for e in 0..m {
        let inv =
            q.inverse_edge(e).ok_or_else(|| Error::Assumption(format!("edge {} has no inverse", q.edge(e).id)))?;
        let (a, b) = (q.edge(e), q.edge(inv));
        if a.src != b.tgt || a.tgt != b.src {
            return Err(Error::Assumption(format!("edge {} is not reversed by its inverse", a.id)));
        }
        if w[e].is_nan() || w[e] <= 0.0 || w[e] != w[inv] {
            return Err(Error::Assumption(format!("weights of {} and its inverse must be equal and positive", a.id)));
        }
    }
    let g = q.digraph();
    if petgraph::algo::connected_components(&g) != 1 {
        return Err(Error::Assumption("graph is not connected".into()));
    }
    Ok(())
}

/// `(det(t + Δ), det(t + Δ0)^N)` for rank-`N` matrices `mats`.
pub fn comparison_values(q: &Quiver, w: &[f64], n: usize, mats: Vec<Matrix<Complex64>>, t: f64) -> Result<(f64, f64)> {
    let p = q.vertex_count();
    let weights = EdgeWeights(w.iter().map(|&x| Complex64::new(x, 0.0)).collect());
    let r = QuiverRep::new(q.clone(), Representation { ranks: vec![n; p], matrices: mats }, weights.clone())?;
    let r0 = QuiverRep::new(
        q.clone(),
        Representation { ranks: vec![1; p], matrices: vec![Matrix::identity(1); q.edge_count()] },
        weights,
    )?;
    let shifted = |rep: &QuiverRep<Complex64>| -> Result<f64> {
        let l = build_laplacian(rep)?;
        Ok(det_oracle(&shifted_laplacian(&l, &vec![t; p]))?.re)
    };
    Ok((shifted(&r)?, shifted(&r0)?.powi(n as i32)))
}

/// Checks `det(t + Δ) ≥ det(t + Δ0)^N` (with slack `1e-9·max(|rhs|, Π (t + z_a)^N)`) for
/// random Haar unitary representations with `U_{e⁻¹} = U_e⁻¹`.
pub fn unitary_comparison_check(
    q: &Quiver,
    w: &[f64],
    n: usize,
    ts: &[f64],
    trials: usize,
    seed: u64,
) -> Result<UnitaryComparison> {
    require_bidirected(q, w)?;
    if n == 0 || ts.iter().any(|t| t.is_nan() || *t < 0.0) {
        return Err(Error::Assumption("rank must be positive and every t nonnegative".into()));
    }
    let mut z = vec![0.0; q.vertex_count()];
    for (e, x) in w.iter().enumerate() {
        z[q.edge(e).src] += x;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = UnitaryComparison { checks: 0, violations: 0, min_ratio: f64::INFINITY };
    for _ in 0..trials {
        let mut mats: Vec<Option<Matrix<Complex64>>> = vec![None; q.edge_count()];
        for e in 0..q.edge_count() {
            if mats[e].is_none() {
                let u = haar_like_unitary(n, &mut rng);
                mats[q.inverse_edge(e).unwrap()] = Some(u.adjoint());
                mats[e] = Some(u);
            }
        }
        let mats: Vec<Matrix<Complex64>> = mats.into_iter().map(Option::unwrap).collect();
        for &t in ts {
            let (lhs, rhs) = comparison_values(q, w, n, mats.clone(), t)?;
            report.checks += 1;
            // rounding is relative to the diagonal product, not to rhs, which can vanish
            let scale: f64 = z.iter().map(|za| (t + za).powi(n as i32)).product();
            if lhs < rhs - 1e-9 * rhs.abs().max(scale) {
                report.violations += 1;
            }
            if rhs > 1e-9 * scale {
                report.min_ratio = report.min_ratio.min(lhs / rhs);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplacian::det_laplacian_cycles;
    use crate::quiver::{gen_example, random_gaussian_rational, Example, RandomParams};
    use crate::ring::{GaussianRational, IndeterminateSet, MultiPoly};

    type Q = GaussianRational;
    type P = MultiPoly<Q>;

    fn symbolic(ex: Example, rank: usize) -> (TwistedLaplacian<P>, IndeterminateSet) {
        let (r, set) = gen_example(&ex, rank, true).unwrap().to_rep::<P>().unwrap();
        (build_laplacian(&r).unwrap(), set)
    }

    #[test]
    fn unicyclic_closed_form() {
        for rank in 1..=2 {
            let (l, _) = symbolic(Example::Unicyclic, rank);
            let q = l.source();
            let value = det_euler_finite(&l).unwrap();
            if rank == 1 {
                assert_eq!(value, det_oracle(l.matrix().matrix()).unwrap());
            }
            let c = match prime_finiteness(&q.quiver) {
                PrimeSet::Finite(p) => p[0].clone(),
                _ => unreachable!(),
            };
            let h = holonomy(q, &c);
            let x = (0..q.quiver.edge_count())
                .fold(P::one(), |acc, e| acc * q.weight(e).pow(l.ranks()[q.quiver.edge(e).src] as u32));
            assert_eq!(value, x * det_oracle(&Matrix::identity(h.rows()).sub(&h)).unwrap());
        }
    }

    #[test]
    fn figure5_product() {
        // z^n det(I − p(c1) hol(c1)) det(I − hol(c2)), cleared of denominators
        let (l, set) = symbolic(Example::Figure5, 1);
        let q = l.source();
        let value = det_euler_finite(&l).unwrap();
        assert_eq!(value, det_oracle(l.matrix().matrix()).unwrap());
        let x = |name: &str| P::var(set.index_of(name).unwrap());
        let hol = |edges: &[usize]| edges.iter().fold(P::one(), |acc, &e| acc * q.matrix(e).get(0, 0).clone());
        let c1 = hol(&[0, 1, 3, 5]);
        let c2 = hol(&[6, 7, 8, 9]);
        let z2 = x("x23") + x("x25");
        let z3 = x("x34") + x("x36");
        let expected = (z2 * z3 - x("x23") * x("x34") * c1)
            * x("x12")
            * x("x41")
            * (P::one() - c2)
            * x("x56")
            * x("x67")
            * x("x78")
            * x("x85");
        assert_eq!(value, expected);
    }

    #[test]
    fn acyclic_is_diagonal_product() {
        let (l, _) = symbolic(Example::Acyclic, 2);
        assert_eq!(det_euler_finite(&l).unwrap(), P::zero());
        assert_eq!(z_power(l.z(), l.ranks().iter().copied()), P::zero());
        // with a shift on the sink the empty product is the diagonal product
        let (r, _) = gen_example(&Example::Acyclic, 1, false).unwrap().to_rep::<Q>().unwrap();
        let rc = r.map(|s| s.to_complex().unwrap());
        let rc = rc.with_matrices(vec![Matrix::identity(1); rc.quiver.edge_count()]).unwrap();
        let l = build_laplacian(&rc).unwrap();
        let kappa = [0.0, 0.0, 0.0, 0.0, 2.0];
        let res = det_euler_truncated(&l, &kappa, EulerOptions::default()).unwrap();
        let diag: Complex64 = l.z().iter().zip(kappa).map(|(z, k)| z + k).product();
        assert!((res.value - diag).norm() < 1e-12);
        assert_eq!(res.primes, 0);
    }

    #[test]
    fn infinite_primes_refused() {
        let (l, _) = symbolic(Example::TwoCycle, 1);
        assert!(det_euler_finite(&l).is_ok());
        let q = Quiver::from_pairs(2, &[(0, 1), (1, 0), (0, 1)]);
        let r = QuiverRep::new(
            q,
            Representation { ranks: vec![1, 1], matrices: vec![Matrix::identity(1); 3] },
            EdgeWeights(vec![Q::one(); 3]),
        )
        .unwrap();
        assert!(matches!(det_euler_finite(&build_laplacian(&r).unwrap()), Err(Error::InfinitePrimes)));
    }

    fn complex_rep(q: Quiver, ranks: Vec<usize>, x: Vec<f64>, seed: u64) -> QuiverRep<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let matrices = q
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = (ranks[e.src], ranks[e.tgt]);
                let u = haar_like_unitary(a.max(b), &mut rng);
                u.submatrix(0..a, 0..b)
            })
            .collect();
        let weights = EdgeWeights(x.into_iter().map(|v| Complex64::new(v, 0.0)).collect());
        QuiverRep::new(q, Representation { ranks, matrices }, weights).unwrap()
    }

    #[test]
    fn two_cycle_with_kappa() {
        let q = Quiver::from_pairs(2, &[(0, 1), (1, 0)]);
        let (u, v) = (Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, -1.1));
        let r = QuiverRep::new(
            q,
            Representation { ranks: vec![1, 1], matrices: vec![Matrix::scalar(1, u), Matrix::scalar(1, v)] },
            EdgeWeights(vec![Complex64::new(1.0, 0.0); 2]),
        )
        .unwrap();
        let l = build_laplacian(&r).unwrap();
        let res = det_euler_truncated(&l, &[1.0, 1.0], EulerOptions::default()).unwrap();
        let exact = det_oracle(&shifted_laplacian(&l, &[1.0, 1.0])).unwrap();
        assert!((res.value - exact).norm() < 1e-8);
        assert!((res.value - exact).norm() <= res.error_bound);
    }

    #[test]
    fn dangling_vertex_makes_chain_sub_markov() {
        // 0 ⇄ 1 with two parallel edges 0→1, and a leak 1→2 where κ_2 > 0
        let q = Quiver::from_pairs(3, &[(0, 1), (0, 1), (1, 0), (1, 2)]);
        let r = complex_rep(q, vec![1, 1, 1], vec![1.0, 0.5, 1.0, 1.0], 3);
        let l = build_laplacian(&r).unwrap();
        let kappa = [0.0, 0.0, 1.0];
        let res = det_euler_truncated(&l, &kappa, EulerOptions::default()).unwrap();
        let exact = det_oracle(&shifted_laplacian(&l, &kappa)).unwrap();
        assert!(res.data.gamma < 1.0);
        assert!((res.value - exact).norm() <= res.error_bound, "{res:?} vs {exact}");
        assert!((res.value - exact).norm() < 1e-8);
    }

    #[test]
    fn finite_primes_with_zero_kappa_match_finite_product() {
        let (r, _) = gen_example(&Example::Figure5, 1, false).unwrap().to_rep::<Q>().unwrap();
        // unit-modulus entries so the norm assumption holds
        let rc = r.map(|s| s.to_complex().unwrap());
        let phases: Vec<Matrix<Complex64>> = rc
            .rep
            .matrices
            .iter()
            .map(|m| m.map(|z| if z.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { z / z.norm() }))
            .collect();
        let rc = rc.with_matrices(phases).unwrap();
        let l = build_laplacian(&rc).unwrap();
        let res = det_euler_truncated(&l, &[0.0; 8], EulerOptions::default()).unwrap();
        let want = det_oracle(l.matrix().matrix()).unwrap();
        assert!((res.value - want).norm() <= 1e-9 * want.norm().max(1.0));
        assert_eq!(res.tail, 0.0);
    }

    #[test]
    fn norm_assumption_refused() {
        let q = Quiver::from_pairs(2, &[(0, 1), (1, 0)]);
        let r = QuiverRep::new(
            q,
            Representation {
                ranks: vec![1, 1],
                matrices: vec![Matrix::scalar(1, Complex64::new(2.0, 0.0)), Matrix::identity(1)],
            },
            EdgeWeights(vec![Complex64::new(1.0, 0.0); 2]),
        )
        .unwrap();
        let l = build_laplacian(&r).unwrap();
        assert!(matches!(det_euler_truncated(&l, &[1.0, 1.0], EulerOptions::default()), Err(Error::Assumption(_))));
    }

    #[test]
    fn unreachable_kappa_refused() {
        let q = Quiver::from_pairs(3, &[(0, 1), (1, 0), (0, 1), (2, 0)]);
        let r = complex_rep(q, vec![1, 1, 1], vec![1.0; 4], 1);
        let l = build_laplacian(&r).unwrap();
        assert!(matches!(
            det_euler_truncated(&l, &[0.0, 0.0, 1.0], EulerOptions::default()),
            Err(Error::Assumption(_))
        ));
    }

    #[test]
    fn certified_bound_on_random_instances() {
        for seed in 0..15 {
            let params = RandomParams { seed, p: 3, max_edges: 5, max_rank: 2, max_total_rank: Some(5) };
            let (r, _) = gen_example(&Example::Random(params), 1, false).unwrap().to_rep::<Q>().unwrap();
            let x: Vec<f64> = r.weights.0.iter().map(|w| w.to_complex().unwrap().re).collect();
            let rc = complex_rep(r.quiver.clone(), r.ranks().to_vec(), x, seed);
            let l = build_laplacian(&rc).unwrap();
            let kappa: Vec<f64> = l.z().iter().map(|z| 1.0 + z.re).collect();
            let res = det_euler_truncated(&l, &kappa, EulerOptions::default()).unwrap();
            let exact = det_oracle(&shifted_laplacian(&l, &kappa)).unwrap();
            let err = (res.value - exact).norm();
            assert!(err <= res.error_bound, "seed {seed}: {err} > {}", res.error_bound);
        }
    }

    #[test]
    fn factor_is_base_point_free() {
        let q = Quiver::from_pairs(3, &[(0, 1), (1, 2), (2, 0)]);
        let r = complex_rep(q, vec![2, 1, 2], vec![1.0; 3], 4);
        let mats = &r.rep.matrices;
        let s = Complex64::new(0.3, 0.0);
        let dets: Vec<Complex64> = (0..3)
            .map(|k| {
                let h = (1..3).fold(mats[k].clone(), |h, i| h.mul(&mats[(k + i) % 3]));
                det_oracle(&Matrix::identity(h.rows()).sub(&h.scale(&s))).unwrap()
            })
            .collect();
        assert!(dets.iter().all(|d| (d - dets[0]).norm() < 1e-12));
    }

    fn bidirected_triangle() -> Quiver {
        Quiver::from_pairs(3, &[(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)]).with_involution(vec![
            (0, 1),
            (2, 3),
            (4, 5),
        ])
    }

    #[test]
    fn unitary_comparison_holds() {
        let q = bidirected_triangle();
        let w = [1.0, 1.0, 2.0, 2.0, 0.5, 0.5];
        for n in 1..=2 {
            let rep = unitary_comparison_check(&q, &w, n, &[0.0, 0.1, 1.0, 10.0], 20, 5).unwrap();
            assert_eq!(rep.violations, 0);
            assert_eq!(rep.checks, 80);
            assert!(rep.min_ratio >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn identity_gives_equality() {
        let q = bidirected_triangle();
        let w = [1.0, 1.0, 2.0, 2.0, 0.5, 0.5];
        for t in [0.1, 1.0, 10.0] {
            let (lhs, rhs) = comparison_values(&q, &w, 2, vec![Matrix::identity(2); 6], t).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs());
        }
        let (lhs, rhs) = comparison_values(&q, &w, 1, vec![Matrix::identity(1); 6], 0.0).unwrap();
        assert!(lhs.abs() < 1e-9 && rhs.abs() < 1e-9);
    }

    #[test]
    fn comparison_preconditions() {
        let q = Quiver::from_pairs(2, &[(0, 1), (1, 0)]);
        assert!(matches!(unitary_comparison_check(&q, &[1.0, 1.0], 1, &[0.0], 1, 0), Err(Error::Assumption(_))));
        let q = q.with_involution(vec![(0, 1)]);
        assert!(matches!(unitary_comparison_check(&q, &[1.0, 2.0], 1, &[0.0], 1, 0), Err(Error::Assumption(_))));
        assert!(unitary_comparison_check(&q, &[1.0, 1.0], 1, &[0.0], 1, 0).is_ok());
    }

    #[test]
    fn finite_product_matches_cycles_on_random_unicyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let q = Quiver::from_pairs(4, &[(0, 1), (1, 2), (2, 0), (3, 1)]);
            let ranks = vec![2, 1, 2, 1];
            let matrices = q
                .edges()
                .iter()
                .map(|e| Matrix::from_fn(ranks[e.src], ranks[e.tgt], |_, _| random_gaussian_rational(&mut rng)))
                .collect();
            let weights = EdgeWeights((0..4).map(|_| random_gaussian_rational(&mut rng)).collect());
            let r = QuiverRep::new(q, Representation { ranks, matrices }, weights).unwrap();
            let l = build_laplacian(&r).unwrap();
            assert_eq!(det_euler_finite(&l).unwrap(), det_laplacian_cycles(&l).unwrap());
        }
    }
}
