use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{IndeterminateSet, Scalar};
use crate::Error;

/// Exponent vector over an [`IndeterminateSet`], stored densely and with
/// trailing zeros trimmed so that the constant monomial is the empty vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() { (self, other) } else { (other, self) };
        let mut e = long.0.clone();
        for (a, b) in e.iter_mut().zip(&short.0) {
            *a += b;
        }
        Monomial(e)
    }
}

/// Multivariate polynomial with coefficients in `C`. Never stores zero
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Scalar> MultiPoly<C> {
    pub fn constant(c: C) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Monomial::var(i), C::one())
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Constant term, or `None` if the polynomial is not constant.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Evaluates the polynomial in a target ring `T`, substituting every
    /// symbol by its value and embedding coefficients with `embed`.
    pub fn eval_with<T: Scalar>(
        &self,
        set: &IndeterminateSet,
        assignment: &HashMap<String, T>,
        embed: impl Fn(&C) -> T,
    ) -> Result<T, Error> {
        let mut values: Vec<Option<T>> = vec![None; set.len()];
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut term = embed(c);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if i >= set.len() {
                    return Err(Error::MissingSymbol(format!("#{i}")));
                }
                if values[i].is_none() {
                    let v = assignment.get(set.name(i)).ok_or_else(|| Error::MissingSymbol(set.name(i).to_string()))?;
                    values[i] = Some(v.clone());
                }
                term = term * values[i].as_ref().unwrap().pow(e);
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Substitutes every variable `i` by `images[i]` (variables beyond the
    /// slice are kept as they are).
    pub fn substitute(&self, images: &[MultiPoly<C>]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            let mut kept = Vec::new();
            for (i, &e) in m.exponents().iter().enumerate() {
                if i < images.len() {
                    kept.push(0);
                    if e > 0 {
                        term = term * images[i].pow(e);
                    }
                } else {
                    kept.push(e);
                }
            }
            out = out + term * Self::monomial(Monomial::new(kept), C::one());
        }
        out
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Terms in display order: ascending total degree, then descending
    /// exponent vector.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then_with(|| padded_cmp(b, a)));
        v
    }

    /// Canonical text form, e.g. `x1*x2 - x1*x2*u*v`.
    pub fn display(&self, set: &IndeterminateSet, coeff: impl Fn(&C) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let mono = display_monomial(m, set);
            let cs = coeff(c);
            let (negative, body) = split_sign(&cs);
            let piece = match (mono.is_empty(), body.as_str()) {
                (true, _) => body.clone(),
                (false, "1") => mono,
                (false, b) if needs_parens(b) => format!("({b})*{mono}"),
                (false, b) => format!("{b}*{mono}"),
            };
            match (k, negative) {
                (0, true) => out.push_str(&format!("-{piece}")),
                (0, false) => out.push_str(&piece),
                (_, true) => out.push_str(&format!(" - {piece}")),
                (_, false) => out.push_str(&format!(" + {piece}")),
            }
        }
        out
    }
}

fn padded_cmp(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    let n = a.0.len().max(b.0.len());
    (0..n).map(|i| a.exponent(i).cmp(&b.exponent(i))).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

fn display_monomial(m: &Monomial, set: &IndeterminateSet) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        let name = if i < set.len() { set.name(i).to_string() } else { format!("s{i}") };
        match e {
            0 => {}
            1 => parts.push(name),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

/// Splits a leading minus sign off a coefficient string when the rest is a
/// single signed quantity.
fn split_sign(s: &str) -> (bool, String) {
    if let Some(rest) = s.strip_prefix('-') {
        if !needs_parens(rest) {
            return (true, rest.to_string());
        }
    }
    (false, s.to_string())
}

fn needs_parens(s: &str) -> bool {
    s.chars().skip(1).any(|c| c == '+' || c == '-' || c == ',')
}

impl<C: Scalar> Add for MultiPoly<C> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (m, c) in o.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<C: Scalar> Sub for MultiPoly<C> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<C: Scalar> Neg for MultiPoly<C> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<C: Scalar> Mul for MultiPoly<C> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.times(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Scalar> Scalar for MultiPoly<C> {
    const EXACT: bool = C::EXACT;

    fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    fn one() -> Self {
        Self::constant(C::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn from_i64(v: i64) -> Self {
        Self::constant(C::from_i64(v))
    }

    fn int_div(&self, k: u64) -> Self {
        self.map_coeffs(|c| c.int_div(k))
    }

    fn to_complex(&self) -> Option<Complex64> {
        self.as_constant()?.to_complex()
    }

    fn mul_int(&self, k: i64) -> Self {
        self.map_coeffs(|c| c.mul_int(k))
    }

    fn approx_eq(&self, other: &Self) -> bool {
        if C::EXACT {
            return self == other;
        }
        let keys: std::collections::BTreeSet<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|m| self.coeff(m).approx_eq(&other.coeff(m)))
    }
}

impl<C: Scalar> From<C> for MultiPoly<C> {
    fn from(c: C) -> Self {
        Self::constant(c)
    }
}
