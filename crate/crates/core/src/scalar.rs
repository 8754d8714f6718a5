//! Minimal field abstraction so the polynomial vector fields can be
//! evaluated both in exact rationals and in complex floating point.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

pub trait Field:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// The rational constant `num / den`.
    fn ratio(num: i64, den: i64) -> Self;

    fn int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    fn is_zero(&self) -> bool;
}

impl Field for Complex64 {
    fn ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn is_zero(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
}

impl Field for f64 {
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Field for BigRational {
    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}
