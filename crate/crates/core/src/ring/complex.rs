use num_complex::Complex64;

use super::{Conjugate, Field, Scalar, FLOAT_ABS_TOL, FLOAT_REL_TOL};

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn int_div(&self, k: u64) -> Self {
        assert!(k > 0, "division by zero");
        self / k as f64
    }

    fn to_complex(&self) -> Option<Complex64> {
        Some(*self)
    }

    fn mul_int(&self, k: i64) -> Self {
        self * k as f64
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let diff = (self - other).norm();
        let scale = self.norm().max(other.norm());
        diff <= FLOAT_ABS_TOL.max(FLOAT_REL_TOL * scale)
    }

    fn pow(&self, e: u32) -> Self {
        self.powu(e)
    }
}

impl Field for Complex64 {
    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(1.0 / self)
        }
    }
}

impl Conjugate for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}
