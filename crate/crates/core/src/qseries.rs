//! Truncated power series in the nome `q = exp(2 pi i tau)` with exact
//! rational coefficients.
//!
//! A series of order `N` stores the coefficients of `q^0 ..= q^N`. Binary
//! operations between series of orders `N` and `M` produce order `min(N, M)`;
//! nothing is ever extrapolated past the shorter input.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default truncation order used by the verification suites.
pub const DEFAULT_ORDER: usize = 64;

/// Sum of the `k`-th powers of the divisors of `n`.
pub fn sigma(k: u32, n: u64) -> Result<BigInt> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidDivisorSum { k, n });
    }
    let mut total = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                total += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    Ok(total)
}

/// `(constant multiplier, divisor power)` of the normalized Eisenstein series
/// `E_w = 1 + c * sum sigma_p(n) q^n`.
fn eisenstein_shape(weight: u32) -> Result<(i64, u32)> {
    match weight {
        2 => Ok((-24, 1)),
        4 => Ok((240, 3)),
        6 => Ok((-504, 5)),
        w => Err(Error::UnsupportedWeight(w)),
    }
}

/// Normalized Eisenstein series `E_2`, `E_4` or `E_6` truncated at `q^order`.
pub fn eisenstein(weight: u32, order: usize) -> Result<QSeries> {
    let (c, p) = eisenstein_shape(weight)?;
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(BigRational::one());
    for n in 1..=order {
        let s = sigma(p, n as u64)? * BigInt::from(c);
        coeffs.push(BigRational::from_integer(s));
    }
    Ok(QSeries { coeffs })
}

/// Floating-point value of `E_weight(tau)` from the Lambert series
/// `1 + c * sum n^p q^n / (1 - q^n)`, summed until the terms drop below
/// machine precision relative to the running sum.
pub fn eisenstein_value(weight: u32, tau: Complex64) -> Result<Complex64> {
    let (c, p) = eisenstein_shape(weight)?;
    let q = nome(tau)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    const CAP: usize = 100_000;
    for n in 1..=CAP {
        qn *= q;
        let term = (n as f64).powi(p as i32) * qn / (1.0 - qn);
        sum += term;
        if term.norm() < 1e-18 * (1.0 + sum.norm()) && qn.norm() < 0.5 {
            return Ok(1.0 + c as f64 * sum);
        }
    }
    Err(Error::NonConvergence { what: "Eisenstein Lambert series", cap: CAP })
}

/// `q = exp(2 pi i tau)`, rejecting points outside the upper half-plane.
pub fn nome(tau: Complex64) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(tau));
    }
    Ok((Complex64::new(0.0, 2.0 * PI) * tau).exp())
}

/// Horner evaluation of float coefficients at `q`.
pub fn horner(coeffs: &[f64], q: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * q + c)
}

/// A point value of a truncated series together with a bound on the
/// discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    /// `|a_N| |q|^(N+1) / (1 - |q|)` using the last retained coefficient.
    pub tail_bound: f64,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<BigRational>,
}

impl QSeries {
    /// Series with the given coefficients; the order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        Self { coeffs }
    }

    pub fn from_integers(order: usize, values: &[i64]) -> Self {
        let mut coeffs = vec![BigRational::zero(); order + 1];
        for (slot, &v) in coeffs.iter_mut().zip(values) {
            *slot = BigRational::from_integer(BigInt::from(v));
        }
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![BigRational::zero(); order + 1] }
    }

    pub fn constant(value: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    /// `q^power` truncated at `order` (zero when `power > order`).
    pub fn monomial(power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = BigRational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `q^n`; zero past the truncation order.
    pub fn coeff(&self, n: usize) -> BigRational {
        self.coeffs.get(n).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order());
        Self { coeffs: self.coeffs[..=keep].to_vec() }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// The modular derivative `D = q d/dq`, i.e. `(1/(2 pi i)) d/dtau`.
    /// The coefficient of `q^n` is multiplied by `n`; the order is kept.
    pub fn derive(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * BigRational::from_integer(BigInt::from(n)))
                .collect(),
        }
    }

    /// Apply [`QSeries::derive`] `times` times.
    pub fn derive_n(&self, times: usize) -> Self {
        (0..times).fold(self.clone(), |s, _| s.derive())
    }

    pub fn float_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Evaluate at `q = exp(2 pi i tau)`.
    pub fn eval(&self, tau: Complex64) -> Result<Evaluation> {
        let q = nome(tau)?;
        let coeffs = self.float_coeffs();
        let value = horner(&coeffs, q);
        let aq = q.norm();
        let last = coeffs.last().copied().unwrap_or(0.0).abs();
        let tail_bound = last * aq.powi(self.order() as i32 + 1) / (1.0 - aq);
        Ok(Evaluation { value, tail_bound })
    }

    /// Rows `(n, numerator, denominator)` in lowest terms, denominator > 0.
    pub fn rows(&self) -> Vec<(usize, BigInt, BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| (n, c.numer().clone(), c.denom().clone()))
            .collect()
    }

    /// Inverse of [`QSeries::rows`]; rows must list `n = 0..=N` in order.
    pub fn from_rows(rows: &[(usize, BigInt, BigInt)]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::MalformedSeries("no rows".into()));
        }
        let mut coeffs = Vec::with_capacity(rows.len());
        for (expected, (n, num, den)) in rows.iter().enumerate() {
            if *n != expected {
                return Err(Error::MalformedSeries(format!("row {expected} has index {n}")));
            }
            if den.is_zero() || den.is_negative() {
                return Err(Error::MalformedSeries(format!("row {n} has denominator {den}")));
            }
            coeffs.push(BigRational::new(num.clone(), den.clone()));
        }
        Ok(Self { coeffs })
    }

    /// CSV dump, one `n,numerator,denominator` line per coefficient.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (n, num, den) in self.rows() {
            out.push_str(&format!("{n},{num},{den}\n"));
        }
        out
    }

    fn zip_with<F>(&self, other: &Self, f: F) -> Self
    where
        F: Fn(&BigRational, &BigRational) -> BigRational,
    {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order).map(|n| f(&self.coeffs[n], &other.coeffs[n])).collect(),
        }
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries(")?;
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})q")?,
                _ => write!(f, "({c})q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{}))", self.order() + 1)
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// Cauchy product truncated at `min(N, M)`.
impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(order + 1 - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        QSeries { coeffs }
    }
}

impl Mul<&BigRational> for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &BigRational) -> QSeries {
        self.scale(rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
