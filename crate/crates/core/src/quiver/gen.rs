//! Named example quivers and seeded random instances.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::io::{Instance, RawEdge, RawEntry};
use crate::linalg::Matrix;
use crate::ring::GaussianRational;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub seed: u64,
    pub p: usize,
    pub max_edges: usize,
    pub max_rank: usize,
    /// Ranks are lowered until their sum fits.
    pub max_total_rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Example {
    /// Directed acyclic graph on 5 vertices with sink 5.
    Acyclic,
    /// Cycle 1→2→3→1 with trees 4→1, 5→4, 6→2 hanging off it.
    Unicyclic,
    /// Cycles 1→2→3→4→1 and 5→6→7→8→5 joined by chords 2→5 and 3→6.
    Figure5,
    /// Edges 1→2 and 2→1.
    TwoCycle,
    Random(RandomParams),
}

impl Example {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "acyclic" => Ok(Example::Acyclic),
            "unicyclic" => Ok(Example::Unicyclic),
            "figure5" => Ok(Example::Figure5),
            "two_cycle" | "two-cycle" => Ok(Example::TwoCycle),
            other => Err(Error::UnknownExample(other.to_string())),
        }
    }

    fn pairs(&self) -> (usize, Vec<(usize, usize)>) {
        match self {
            Example::Acyclic => (5, vec![(1, 2), (1, 3), (2, 4), (3, 4), (2, 5), (4, 5)]),
            Example::Unicyclic => (6, vec![(1, 2), (2, 3), (3, 1), (4, 1), (5, 4), (6, 2)]),
            Example::Figure5 => {
                (8, vec![(1, 2), (2, 3), (2, 5), (3, 4), (3, 6), (4, 1), (5, 6), (6, 7), (7, 8), (8, 5)])
            }
            Example::TwoCycle => (2, vec![(1, 2), (2, 1)]),
            Example::Random(_) => unreachable!(),
        }
    }
}

/// Builds a named family with every rank equal to `rank`, or a random
/// instance.
///
/// With `symbolic`, weights of the named families are the symbols `x<s><t>`
/// (`x1`, `x2` for the two-cycle, whose rank-1 matrices are `u` and `v`);
/// otherwise they are fixed positive rationals. Matrices are seeded random
/// Gaussian rationals.
pub fn gen_example(ex: &Example, rank: usize, symbolic: bool) -> Result<Instance> {
    if let Example::Random(params) = ex {
        return random_instance(params, symbolic);
    }
    if rank == 0 {
        return Err(Error::Dimension("rank must be positive".into()));
    }
    let (p, pairs) = ex.pairs();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + p as u64);
    let edges = pairs
        .iter()
        .enumerate()
        .map(|(i, &(s, t))| {
            let weight = match (symbolic, ex) {
                (true, Example::TwoCycle) => RawEntry::sym(format!("x{}", i + 1)),
                (true, _) => RawEntry::sym(format!("x{s}{t}")),
                (false, _) => RawEntry::exact(&random_weight(&mut rng)),
            };
            let matrix = match (symbolic, ex, rank) {
                (true, Example::TwoCycle, 1) => vec![vec![RawEntry::sym(if i == 0 { "u" } else { "v" })]],
                _ => random_raw_matrix(&mut rng, rank, rank),
            };
            RawEdge { id: format!("e{}", i + 1), src: s as i64, tgt: t as i64, weight, matrix }
        })
        .collect();
    Ok(Instance { p, ranks: vec![rank; p], edges, involution: None })
}

fn random_instance(params: &RandomParams, symbolic: bool) -> Result<Instance> {
    let RandomParams { seed, p, max_edges, max_rank, max_total_rank } = *params;
    if p == 0 || max_rank == 0 {
        return Err(Error::Dimension("random instances need p >= 1 and max_rank >= 1".into()));
    }
    if p == 1 && max_edges > 0 {
        return Err(Error::Dimension("a single vertex admits no edges without self-loops".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks: Vec<usize> = (0..p).map(|_| rng.random_range(1..=max_rank)).collect();
    if let Some(cap) = max_total_rank {
        if cap < p {
            return Err(Error::Dimension(format!("total rank cap {cap} is below p = {p}")));
        }
        while ranks.iter().sum::<usize>() > cap {
            let a = (0..p).max_by_key(|&a| (ranks[a], a)).unwrap();
            ranks[a] -= 1;
        }
    }
    let m = if max_edges == 0 { 0 } else { rng.random_range(1..=max_edges) };
    let edges = (0..m)
        .map(|i| {
            let s = rng.random_range(0..p);
            let t = (s + rng.random_range(1..p)) % p;
            let weight =
                if symbolic { RawEntry::sym(format!("x{}", i + 1)) } else { RawEntry::exact(&random_weight(&mut rng)) };
            let matrix = random_raw_matrix(&mut rng, ranks[s], ranks[t]);
            RawEdge { id: format!("e{}", i + 1), src: s as i64 + 1, tgt: t as i64 + 1, weight, matrix }
        })
        .collect();
    Ok(Instance { p, ranks, edges, involution: None })
}

fn random_weight(rng: &mut impl Rng) -> GaussianRational {
    GaussianRational::from_ratio(rng.random_range(1..=4), rng.random_range(1..=3))
}

/// Small random Gaussian rational: parts in `{-2, …, 2} / {1, 2}`, real about
/// half of the time.
pub fn random_gaussian_rational(rng: &mut impl Rng) -> GaussianRational {
    let re = GaussianRational::from_ratio(rng.random_range(-2..=2), rng.random_range(1..=2));
    if rng.random_bool(0.5) {
        re
    } else {
        re + GaussianRational::from_ratio(rng.random_range(-2..=2), rng.random_range(1..=2)) * GaussianRational::i()
    }
}

fn random_raw_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<RawEntry>> {
    (0..rows).map(|_| (0..cols).map(|_| RawEntry::exact(&random_gaussian_rational(rng))).collect()).collect()
}

/// Random unitary from the Gram–Schmidt orthonormalisation of a complex
/// Gaussian matrix. The triangular factor has a positive diagonal, so the
/// result is Haar distributed.
pub fn haar_like_unitary(n: usize, rng: &mut impl Rng) -> Matrix<Complex64> {
    assert!(n >= 1);
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|_| (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
            .collect();
        let mut degenerate = false;
        for j in 0..n {
            for k in 0..j {
                let dot: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                let prev = cols[k].clone();
                for (x, y) in cols[j].iter_mut().zip(prev) {
                    *x -= y * dot;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                degenerate = true;
                break;
            }
            for z in &mut cols[j] {
                *z /= norm;
            }
        }
        if !degenerate {
            return Matrix::from_fn(n, n, |i, j| cols[j][i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::validate;
    use crate::ring::{MultiPoly, Scalar};

    #[test]
    fn families_validate() {
        for ex in [Example::Acyclic, Example::Unicyclic, Example::Figure5, Example::TwoCycle] {
            for rank in 1..=2 {
                for symbolic in [false, true] {
                    let inst = gen_example(&ex, rank, symbolic).unwrap();
                    let (q, _) = inst.to_rep::<MultiPoly<GaussianRational>>().unwrap();
                    assert!(validate(&q.quiver, &q.rep, &q.weights).is_ok());
                }
            }
        }
    }

    #[test]
    fn acyclic_has_topological_order() {
        let (q, _) = gen_example(&Example::Acyclic, 1, false).unwrap().to_rep::<GaussianRational>().unwrap();
        let order = petgraph::algo::toposort(&q.quiver.digraph(), None).expect("acyclic");
        assert_eq!(order.len(), 5);
        assert!(q.quiver.is_acyclic());
    }

    #[test]
    fn shape_of_named_families() {
        let (u, _) = gen_example(&Example::Unicyclic, 1, false).unwrap().to_rep::<GaussianRational>().unwrap();
        assert!((0..6).all(|a| u.quiver.out_degree(a) == 1));
        let (f, _) = gen_example(&Example::Figure5, 1, false).unwrap().to_rep::<GaussianRational>().unwrap();
        let outdeg: Vec<usize> = (0..8).map(|a| f.quiver.out_degree(a)).collect();
        assert_eq!(outdeg, vec![1, 2, 2, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(Example::from_name("petersen"), Err(Error::UnknownExample(_))));
    }

    #[test]
    fn random_is_deterministic() {
        let params = RandomParams { seed: 1, p: 4, max_edges: 6, max_rank: 3, max_total_rank: Some(7) };
        let a = gen_example(&Example::Random(params.clone()), 1, false).unwrap();
        let b = gen_example(&Example::Random(params.clone()), 1, false).unwrap();
        assert_eq!(a, b);
        assert!(a.ranks.iter().sum::<usize>() <= 7);
        let (q, _) = a.to_rep::<GaussianRational>().unwrap();
        assert!(q.quiver.edges().iter().all(|e| e.src != e.tgt));
        let other = gen_example(&Example::Random(RandomParams { seed: 2, ..params }), 1, false).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn haar_unitary_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u1 = haar_like_unitary(1, &mut rng);
        assert!((u1.get(0, 0).norm() - 1.0).abs() < 1e-12);
        for n in 1..=4 {
            let u = haar_like_unitary(n, &mut rng);
            let d = u.adjoint().mul(&u).sub(&Matrix::identity(n));
            assert!(d.entries().iter().all(|z| z.norm() < 1e-10));
        }
        let a = haar_like_unitary(3, &mut ChaCha8Rng::seed_from_u64(4));
        let b = haar_like_unitary(3, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
    }

    #[test]
    fn random_gaussian_rationals_are_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let g = random_gaussian_rational(&mut rng);
            let c = g.to_complex().unwrap();
            assert!(c.re.abs() <= 2.0 && c.im.abs() <= 2.0);
        }
    }
}
