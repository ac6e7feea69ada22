use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Conjugate, Field, Scalar};

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn int_div(&self, k: u64) -> Self {
        assert!(k > 0, "division by zero");
        self / BigRational::from_integer(BigInt::from(k))
    }

    fn to_complex(&self) -> Option<Complex64> {
        Some(Complex64::new(self.to_f64()?, 0.0))
    }
}

impl Field for BigRational {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Conjugate for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }
}

/// Canonical text form: `"3"`, `"-3/4"`.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"n"`, `"n/d"` or a decimal literal such as `"-0.25"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_abs = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{}{}", if int_abs.is_empty() { "0" } else { int_abs }, frac);
        let mut value = BigRational::new(digits.parse().ok()?, BigInt::from(10u32).pow(frac.len() as u32));
        if negative {
            value = -value;
        }
        return Some(value);
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

pub(crate) fn rational_is_negative(q: &BigRational) -> bool {
    q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let q = parse_rational("6/8").unwrap();
        assert_eq!(format_rational(&q), "3/4");
        assert_eq!(format_rational(&parse_rational("-0.25").unwrap()), "-1/4");
        assert_eq!(format_rational(&parse_rational("7").unwrap()), "7");
        assert_eq!(format_rational(&parse_rational("2/-4").unwrap()), "-1/2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let q = parse_rational("10/-4").unwrap();
        assert_eq!(q.numer(), &BigInt::from(-5));
        assert_eq!(q.denom(), &BigInt::from(2));
    }
}
