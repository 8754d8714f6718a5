//! Affine and projective connections in genus one: log-derivative and
//! Schwarzian brackets, the `E2` affine connection and its curvature, the
//! Serre derivative, and the Bergman, Klein and Wirtinger constructions.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::elliptic::{
    g2_eisenstein, theta_constant_log_second, wp, wp_regular, ThetaChar, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::numeric::{cauchy_derivatives, integrate_segment};
use crate::qseries::{eisenstein, eisenstein_value, rat, QSeries};

/// First three derivatives of a holomorphic map at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapJet {
    pub t: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl MapJet {
    pub fn new(t: Complex64, d1: Complex64, d2: Complex64, d3: Complex64) -> Self {
        Self { t, d1, d2, d3 }
    }

    /// Jet of `f` at `t` from Cauchy integrals on a circle of `radius`, which
    /// must lie inside the disc where `f` is holomorphic.
    pub fn from_fn<F>(f: F, t: Complex64, radius: f64) -> Self
    where
        F: Fn(Complex64) -> Complex64,
    {
        let [_, d1, d2, d3] = cauchy_derivatives::<_, 4>(f, t, radius, 64);
        Self { t, d1, d2, d3 }
    }

    fn checked(&self) -> Result<()> {
        if self.d1.norm() == 0.0 {
            return Err(Error::VanishingDerivative(self.t));
        }
        Ok(())
    }

    /// `{f, t}_1 = (log f')'`.
    pub fn bracket1(&self) -> Result<Complex64> {
        self.checked()?;
        Ok(self.d2 / self.d1)
    }

    /// `{f, t}_2 = (log f')'' - ((log f')')^2 / 2 = f'''/f' - (3/2)(f''/f')^2`.
    pub fn schwarzian(&self) -> Result<Complex64> {
        self.checked()?;
        let r = self.d2 / self.d1;
        Ok(self.d3 / self.d1 - 1.5 * r * r)
    }
}

/// An `SL(2, Z)` matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sl2z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Sl2z {
    pub const IDENTITY: Sl2z = Sl2z { a: 1, b: 0, c: 0, d: 1 };
    pub const T: Sl2z = Sl2z { a: 1, b: 1, c: 0, d: 1 };
    pub const S: Sl2z = Sl2z { a: 0, b: -1, c: 1, d: 0 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(Error::NotUnimodular(det));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn act(&self, tau: Complex64) -> Complex64 {
        (self.a as f64 * tau + self.b as f64) / (self.c as f64 * tau + self.d as f64)
    }

    pub fn automorphy(&self, tau: Complex64) -> Complex64 {
        self.c as f64 * tau + self.d as f64
    }
}

/// `|E2(m tau) (c tau + d)^-2 - E2(tau) - (6 / (i pi)) c / (c tau + d)|`.
pub fn e2_affine_check(m: Sl2z, tau: Complex64) -> Result<f64> {
    Sl2z::new(m.a, m.b, m.c, m.d)?;
    let j = m.automorphy(tau);
    let lhs = eisenstein_value(2, m.act(tau))? / (j * j);
    let rhs = eisenstein_value(2, tau)? + 6.0 / Complex64::new(0.0, PI) * m.c as f64 / j;
    Ok((lhs - rhs).norm())
}

/// `r' - r^2 / 2` for the connection `r = (pi i / 3) E2`, derivative in `tau`.
pub fn affine_curvature(tau: Complex64, order: usize) -> Result<Complex64> {
    let e2 = eisenstein(2, order)?;
    let value = e2.eval(tau)?.value;
    let deriv = e2.derive().eval(tau)?.value;
    let r = Complex64::new(0.0, PI / 3.0) * value;
    let r1 = Complex64::new(0.0, PI / 3.0) * Complex64::new(0.0, 2.0 * PI) * deriv;
    Ok(r1 - 0.5 * r * r)
}

/// Exact residual of the curvature identity with the powers of `pi` cleared:
/// dividing `r' - r^2/2 = (pi^2/18) E4` by `pi^2` gives
/// `-(2/3) D E2 + (1/18) E2^2 - (1/18) E4`, which must vanish.
pub fn curvature_series_residual(order: usize) -> Result<QSeries> {
    let e2 = eisenstein(2, order)?;
    let e4 = eisenstein(4, order)?;
    let lhs = &e2.derive().scale(&rat(-2, 3)) + &(&e2 * &e2).scale(&rat(1, 18));
    Ok(&lhs - &e4.scale(&rat(1, 18)))
}

/// Serre derivative `D s - (k/6) E2 s` for a form of weight `2k`.
pub fn serre_derivative(k: i64, s: &QSeries) -> Result<QSeries> {
    let e2 = eisenstein(2, s.order())?;
    let correction = (&e2 * s).scale(&BigRational::new(k.into(), 6.into()));
    Ok(&s.derive() - &correction)
}

/// A symmetric bidifferential `(1/(u-v)^2 + H(u, v)) du dv` sampled at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BidifferentialValue {
    pub u: Complex64,
    pub v: Complex64,
    pub value: Complex64,
    /// Coefficient of `1/(u-v)^2`.
    pub singular: Complex64,
    pub regular: Complex64,
}

/// `K(u, v) = p(u - v) + eta_1/omega_1` on the lattice `Z + Z tau`.
pub fn bergman_kernel(u: Complex64, v: Complex64, tau: Complex64) -> Result<BidifferentialValue> {
    let w = u - v;
    let shift = g2_eisenstein(tau, DEFAULT_TOL)?;
    let value = wp(w, tau, DEFAULT_TOL)? + shift;
    Ok(BidifferentialValue {
        u,
        v,
        value,
        singular: Complex64::new(1.0, 0.0),
        regular: wp_regular(w, tau, DEFAULT_TOL)? + shift,
    })
}

/// Regular part of the Bergman kernel on the diagonal, `H(u, u)`.
pub fn bergman_diagonal(tau: Complex64) -> Result<Complex64> {
    Ok(wp_regular(Complex64::new(0.0, 0.0), tau, DEFAULT_TOL)? + g2_eisenstein(tau, DEFAULT_TOL)?)
}

/// `int_0^1 K(x + v + i offset, v) dx` by 64-point Gauss-Legendre.
pub fn bergman_a_period(v: Complex64, offset: f64, tau: Complex64) -> Result<Complex64> {
    let shift = g2_eisenstein(tau, DEFAULT_TOL)?;
    let start = v + Complex64::new(0.0, offset);
    let mut failure = None;
    let total = integrate_segment(
        |u| match wp(u - v, tau, DEFAULT_TOL) {
            Ok(p) => p + shift,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        start,
        start + 1.0,
        64,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Bergman kernel shifted by `(log theta[ch])''(0)`.
pub fn klein_bidifferential(
    ch: ThetaChar,
    u: Complex64,
    v: Complex64,
    tau: Complex64,
) -> Result<BidifferentialValue> {
    let correction = theta_constant_log_second(ch, tau, DEFAULT_TOL)?;
    let mut k = bergman_kernel(u, v, tau)?;
    k.value += correction;
    k.regular += correction;
    Ok(k)
}

/// `6 H(u, u)` for the Klein bidifferential of an even characteristic.
pub fn wirtinger_connection(ch: ThetaChar, tau: Complex64) -> Result<Complex64> {
    let correction = theta_constant_log_second(ch, tau, DEFAULT_TOL)?;
    Ok(6.0 * (bergman_diagonal(tau)? + correction))
}

/// `6 H(u, u)` for the average of the three even Klein bidifferentials.
pub fn klein_invariant_connection(tau: Complex64) -> Result<Complex64> {
    let mut avg = Complex64::new(0.0, 0.0);
    for ch in ThetaChar::EVEN {
        avg += theta_constant_log_second(ch, tau, DEFAULT_TOL)?;
    }
    Ok(6.0 * (bergman_diagonal(tau)? + avg / 3.0))
}

/// `p(u) - p(u + omega_k) - (1/u^2 - e_k)`, which is `O(u^2)`.
pub fn half_period_expansion_defect(k: usize, u: Complex64, tau: Complex64) -> Result<Complex64> {
    let omega = crate::elliptic::half_periods(tau)[k];
    let e = wp(omega, tau, DEFAULT_TOL)?;
    Ok(wp_regular(u, tau, DEFAULT_TOL)? - wp(u + omega, tau, DEFAULT_TOL)? + e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn affine_maps_have_trivial_brackets() {
        let jet = MapJet::from_fn(|t| c(2.0, 1.0) * t + 3.0, c(0.4, 0.2), 0.1);
        assert!(jet.bracket1().unwrap().norm() < 1e-12);
        assert!(jet.schwarzian().unwrap().norm() < 1e-12);
    }

    #[test]
    fn mobius_maps_have_zero_schwarzian() {
        let f = |t: Complex64| (2.0 * t + 1.0) / (t + 3.0);
        let jet = MapJet::from_fn(f, c(0.5, 0.5), 0.1);
        assert!(jet.schwarzian().unwrap().norm() < 1e-7);
    }

    #[test]
    fn vanishing_derivative_is_rejected() {
        let jet = MapJet::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!(matches!(jet.schwarzian(), Err(Error::VanishingDerivative(_))));
    }

    #[test]
    fn e2_transformation() {
        let tau = c(0.0, 2.0);
        assert_eq!(e2_affine_check(Sl2z::IDENTITY, tau).unwrap(), 0.0);
        assert!(e2_affine_check(Sl2z::T, tau).unwrap() < 1e-10);
        assert!(e2_affine_check(Sl2z::S, tau).unwrap() < 1e-8);
        assert!(matches!(Sl2z::new(2, 0, 0, 1), Err(Error::NotUnimodular(2))));
    }

    #[test]
    fn curvature_is_e4_multiple() {
        assert!(curvature_series_residual(64).unwrap().is_zero());
        let tau = c(0.0, 2.0);
        let k = affine_curvature(tau, 64).unwrap();
        let e4 = eisenstein(4, 64).unwrap().eval(tau).unwrap().value;
        assert!((k - PI * PI / 18.0 * e4).norm() < 1e-9);
    }

    #[test]
    fn serre_examples() {
        let e4 = eisenstein(4, 64).unwrap();
        let e6 = eisenstein(6, 64).unwrap();
        assert_eq!(serre_derivative(2, &e4).unwrap(), e6.scale(&rat(-1, 3)));
        assert_eq!(serre_derivative(3, &e6).unwrap(), (&e4 * &e4).scale(&rat(-1, 2)));
        assert!(serre_derivative(0, &QSeries::one(10)).unwrap().is_zero());
    }

    #[test]
    fn bergman_kernel_basics() {
        let tau = c(0.1, 1.2);
        let (u, v) = (c(0.3, 0.2), c(-0.1, 0.05));
        let a = bergman_kernel(u, v, tau).unwrap();
        let b = bergman_kernel(v, u, tau).unwrap();
        assert!((a.value - b.value).norm() < 1e-10);
        let near = bergman_kernel(u + 1e-3, u, tau).unwrap();
        assert!((near.value * 1e-6 - 1.0).norm() < 1e-4);
        assert!(bergman_a_period(c(0.2, 0.3), 0.1, tau).unwrap().norm() < 1e-6);
    }

    #[test]
    fn klein_rejects_odd_characteristic() {
        let r = klein_bidifferential(ThetaChar::ODD, c(0.1, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        assert!(matches!(r, Err(Error::OddCharacteristic(1, 1))));
    }
}
