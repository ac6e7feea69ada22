//! Commutative-ring scalars.
//!
//! Every identity in this crate is written once, generically over [`Scalar`],
//! and evaluated with whichever coefficient ring the caller picks: double
//! precision complex numbers, exact rationals, exact Gaussian rationals, or
//! multivariate polynomials over any of those.
//!
//! The interface only requires division by positive integers. General
//! inversion lives in the separate [`Field`] trait and is used only by code
//! paths that genuinely need it (gauge transformations, Euler products with
//! `1/z` factors).

mod complex;
mod gaussian;
mod poly;
mod rational;

use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub use gaussian::GaussianRational;
pub use poly::{Monomial, MultiPoly};
pub use rational::{format_rational, parse_rational};

pub use num_rational::BigRational;

/// Relative tolerance used by [`Scalar::approx_eq`] for floating variants.
pub const FLOAT_REL_TOL: f64 = 1e-9;
/// Absolute floor used by [`Scalar::approx_eq`] for floating variants.
pub const FLOAT_ABS_TOL: f64 = 1e-12;

/// An element of a commutative ring of characteristic zero.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether equality is exact (as opposed to tolerance based).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;

    /// Exact division by a positive integer (floating division for floats).
    ///
    /// Panics if `k == 0`.
    fn int_div(&self, k: u64) -> Self;

    /// Numeric embedding into the complex numbers, when one exists.
    fn to_complex(&self) -> Option<Complex64>;

    fn mul_int(&self, k: i64) -> Self {
        self.clone() * Self::from_i64(k)
    }

    /// Equality for exact variants, tolerance comparison for floats.
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// Scalars with multiplicative inverses for nonzero elements.
pub trait Field: Scalar {
    fn inv(&self) -> Option<Self>;
}

/// Complex-conjugation, used by unitary checks.
pub trait Conjugate: Scalar {
    fn conj(&self) -> Self;
}

/// Sum of an iterator of scalars, folding left to right.
pub fn sum<S: Scalar>(iter: impl IntoIterator<Item = S>) -> S {
    iter.into_iter().fold(S::zero(), |acc, x| acc + x)
}

/// Product of an iterator of scalars, folding left to right.
pub fn product<S: Scalar>(iter: impl IntoIterator<Item = S>) -> S {
    iter.into_iter().fold(S::one(), |acc, x| acc * x)
}

/// `k!` as a `u64`. Panics on overflow (k > 20).
pub fn factorial(k: u64) -> u64 {
    (1..=k).try_fold(1u64, |acc, i| acc.checked_mul(i)).expect("factorial overflow")
}

/// Exact division `s / k` in the ring of `s`.
pub fn int_div<S: Scalar>(s: &S, k: u64) -> S {
    s.int_div(k)
}

/// Ordered list of formal symbols (edge weights, vertex weights, shifts).
///
/// Indices never change once a name is interned.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndeterminateSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl IndeterminateSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from distinct names, in order.
    pub fn from_names<I, T>(names: I) -> Result<Self, crate::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let mut set = Self::new();
        for name in names {
            let name = name.into();
            if set.index.contains_key(&name) {
                return Err(crate::Error::DuplicateSymbol(name));
            }
            set.intern(&name);
        }
        Ok(set)
    }

    /// Returns the index of `name`, adding it if absent.
    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Substitutes symbols of `p` by values from `assignment`.
pub fn poly_eval<C: Scalar>(
    p: &MultiPoly<C>,
    set: &IndeterminateSet,
    assignment: &HashMap<String, C>,
) -> Result<C, crate::Error> {
    p.eval_with(set, assignment, |c| c.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn gr(a: (i64, i64), b: (i64, i64)) -> GaussianRational {
        GaussianRational::new(q(a.0, a.1), q(b.0, b.1))
    }

    #[test]
    fn int_div_examples() {
        assert_eq!(int_div(&BigRational::from_i64(6), 3), BigRational::from_i64(2));
        let half = gr((1, 1), (1, 1)).int_div(2);
        assert_eq!(half, gr((1, 2), (1, 2)));

        let mut set = IndeterminateSet::new();
        let x1 = MultiPoly::<GaussianRational>::var(set.intern("x1"));
        assert_eq!(x1.mul_int(2).int_div(2), x1);
    }

    #[test]
    fn poly_eval_examples() {
        let set = IndeterminateSet::from_names(["x1", "x2", "u", "v"]).unwrap();
        let var = |n: &str| MultiPoly::<BigRational>::var(set.index_of(n).unwrap());
        let assign: HashMap<String, BigRational> = [("x1", 2), ("x2", 3), ("u", 1), ("v", 1)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), BigRational::from_i64(v)))
            .collect();

        let p = var("x1") * var("x2");
        let three_five: HashMap<String, BigRational> =
            [("x1".to_string(), BigRational::from_i64(3)), ("x2".to_string(), BigRational::from_i64(5))]
                .into_iter()
                .collect();
        assert_eq!(poly_eval(&p, &set, &three_five).unwrap(), BigRational::from_i64(15));

        assert_eq!(poly_eval(&MultiPoly::zero(), &set, &assign).unwrap(), BigRational::zero());

        // x1 x2 (1 - u v): determinant of the two-cycle Laplacian
        let det = var("x1") * var("x2") * (MultiPoly::one() - var("u") * var("v"));
        assert_eq!(poly_eval(&det, &set, &assign).unwrap(), BigRational::zero());
    }

    #[test]
    fn poly_eval_names_missing_symbol() {
        let set = IndeterminateSet::from_names(["x1", "x2"]).unwrap();
        let p = MultiPoly::<BigRational>::var(1);
        let err = poly_eval(&p, &set, &HashMap::new()).unwrap_err();
        assert!(err.to_string().contains("x2"), "{err}");
    }

    #[test]
    fn duplicate_symbols_rejected() {
        assert!(IndeterminateSet::from_names(["a", "b", "a"]).is_err());
    }

    #[test]
    fn float_tolerance() {
        let a = Complex64::new(1.0, 0.0);
        assert!(a.approx_eq(&Complex64::new(1.0 + 1e-11, 0.0)));
        assert!(!a.approx_eq(&Complex64::new(1.0 + 1e-8, 0.0)));
        assert!(Complex64::new(0.0, 0.0).approx_eq(&Complex64::new(1e-13, 0.0)));
    }

    fn arb_gr() -> impl Strategy<Value = GaussianRational> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9).prop_map(|(a, b, c, d)| gr((a, b), (c, d)))
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly<GaussianRational>> {
        prop::collection::vec((prop::collection::vec(0u32..3, 0..3), arb_gr()), 0..5).prop_map(|terms| {
            terms
                .into_iter()
                .fold(MultiPoly::zero(), |acc, (exps, c)| acc + MultiPoly::monomial(Monomial::new(exps), c))
        })
    }

    proptest! {
        #[test]
        fn gaussian_ring_axioms(a in arb_gr(), b in arb_gr(), c in arb_gr()) {
            prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
            prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
            prop_assert_eq!(a.clone() - a.clone(), GaussianRational::zero());
        }

        #[test]
        fn poly_ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            prop_assert_eq!(a.clone() * b.clone(), b * a.clone());
            prop_assert!((a.clone() - a).is_zero());
        }

        #[test]
        fn poly_eval_is_multiplicative(a in arb_poly(), b in arb_poly(), vals in prop::collection::vec(arb_gr(), 3)) {
            let set = IndeterminateSet::from_names(["s0", "s1", "s2"]).unwrap();
            let assign: HashMap<String, GaussianRational> =
                set.names().iter().cloned().zip(vals).collect();
            let lhs = poly_eval(&(a.clone() * b.clone()), &set, &assign).unwrap();
            let rhs = poly_eval(&a, &set, &assign).unwrap() * poly_eval(&b, &set, &assign).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn int_div_inverts_mul_int(a in arb_gr(), p in arb_poly(), k in 1i64..50) {
            prop_assert_eq!(a.mul_int(k).int_div(k as u64), a);
            prop_assert_eq!(p.mul_int(k).int_div(k as u64), p);
        }
    }
}
