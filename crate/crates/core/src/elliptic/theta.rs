//! Genus-one theta functions with characteristics and the four Jacobi thetas.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the number of symmetric term pairs in a theta sum.
const TERM_CAP: usize = 10_000;

/// A characteristic `[eps; delta]` with entries in `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaChar {
    eps: u8,
    delta: u8,
}

impl ThetaChar {
    /// `[1;0]`, `[0;1]`, `[0;0]`: the even characteristics in the order that
    /// pairs them with the half-periods `omega_1`, `omega_2`, `omega_3`.
    pub const EVEN: [ThetaChar; 3] = [
        ThetaChar { eps: 1, delta: 0 },
        ThetaChar { eps: 0, delta: 1 },
        ThetaChar { eps: 0, delta: 0 },
    ];
    pub const ODD: ThetaChar = ThetaChar { eps: 1, delta: 1 };

    pub fn new(eps: u8, delta: u8) -> Result<Self> {
        if eps > 1 || delta > 1 {
            return Err(Error::InvalidCharacteristic(eps, delta));
        }
        Ok(Self { eps, delta })
    }

    pub fn eps(self) -> u8 {
        self.eps
    }

    pub fn delta(self) -> u8 {
        self.delta
    }

    /// `eps * delta mod 2`.
    pub fn parity(self) -> u8 {
        self.eps * self.delta
    }

    pub fn is_even(self) -> bool {
        self.parity() == 0
    }

    /// Half-period index `k` (1, 2 or 3) such that this characteristic's
    /// theta function is the one shifted by `omega_k`. `None` for the odd one.
    pub fn half_period_index(self) -> Option<usize> {
        Self::EVEN.iter().position(|&c| c == self).map(|i| i + 1)
    }
}

impl fmt::Display for ThetaChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};{}]", self.eps, self.delta)
    }
}

/// `theta` and its first three `z`-derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaJet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl ThetaJet {
    /// `(d/dz)^2 log theta`.
    pub fn log_second(&self) -> Complex64 {
        let r = self.d1 / self.value;
        self.d2 / self.value - r * r
    }
}

fn check_args(tau: Complex64, tol: f64) -> Result<()> {
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(tau));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

/// `theta[eps;delta](z, tau) = sum_m exp(i pi m^2 tau + 2 pi i m (z + delta/2))`
/// over `m in Z + eps/2`, with the termwise derivatives in `z`.
///
/// Terms are taken in pairs `m, -m`; summation stops once both are past the
/// peak of the Gaussian and below `tol` relative to the running total.
pub fn theta_char_jet(ch: ThetaChar, z: Complex64, tau: Complex64, tol: f64) -> Result<ThetaJet> {
    check_args(tau, tol)?;
    let i = Complex64::i();
    let shift = z + ch.delta as f64 / 2.0;
    // Beyond this |m| every term decreases monotonically.
    let peak = (z.im.abs() / tau.im).ceil() + 1.0;
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for j in 0..TERM_CAP {
        let base = j as f64 + ch.eps as f64 / 2.0;
        let mut pair_size = 0.0f64;
        let ms: &[f64] = if base == 0.0 { &[0.0] } else { &[base, -base] };
        for &m in ms {
            let term = (i * PI * m * m * tau + 2.0 * PI * i * m * shift).exp();
            let factor = 2.0 * PI * i * m;
            let mut t = term;
            for slot in acc.iter_mut() {
                *slot += t;
                t *= factor;
            }
            pair_size = pair_size.max(term.norm() * (1.0 + (2.0 * PI * m).abs().powi(3)));
        }
        let scale = acc.iter().map(|a| a.norm()).fold(1.0, f64::max);
        if base > peak && pair_size < tol * 1e-3 * scale {
            return Ok(ThetaJet { value: acc[0], d1: acc[1], d2: acc[2], d3: acc[3] });
        }
    }
    Err(Error::NonConvergence { what: "theta series", cap: TERM_CAP })
}

/// Value of `theta[eps;delta](z, tau)`.
pub fn theta_char(ch: ThetaChar, z: Complex64, tau: Complex64, tol: f64) -> Result<Complex64> {
    theta_char_jet(ch, z, tau, tol).map(|j| j.value)
}

/// Second logarithmic derivative `(log theta[ch])''(z)`, computed termwise.
pub fn log_theta_second(ch: ThetaChar, z: Complex64, tau: Complex64, tol: f64) -> Result<Complex64> {
    let jet = theta_char_jet(ch, z, tau, tol)?;
    if jet.value.norm() < 1e-300 {
        return Err(Error::VanishingThetaConstant(ch.eps, ch.delta));
    }
    Ok(jet.log_second())
}

/// Second logarithmic derivative at `z = 0` of an even theta function, the
/// correction that turns the Bergman kernel into a Klein bidifferential.
pub fn theta_constant_log_second(ch: ThetaChar, tau: Complex64, tol: f64) -> Result<Complex64> {
    if !ch.is_even() {
        return Err(Error::OddCharacteristic(ch.eps, ch.delta));
    }
    let jet = theta_char_jet(ch, Complex64::new(0.0, 0.0), tau, tol)?;
    if jet.value.norm() < tol {
        return Err(Error::VanishingThetaConstant(ch.eps, ch.delta));
    }
    Ok(jet.log_second())
}

/// The four Jacobi thetas as cosine/sine series in the nome `q = exp(i pi tau)`:
///
/// * `k = 1`: `2 sum q^((n+1/2)^2) cos((2n+1) pi z)`, i.e. `theta[1;0]`
/// * `k = 2`: `1 + 2 sum (-1)^n q^(n^2) cos(2 n pi z)`, i.e. `theta[0;1]`
/// * `k = 3`: `1 + 2 sum q^(n^2) cos(2 n pi z)`, i.e. `theta[0;0]`
/// * `k = 4`: `2 sum (-1)^n q^((n+1/2)^2) sin((2n+1) pi z)`, the odd function
///   (see [`theta_odd`]); it equals `-theta[1;1]`.
pub fn jacobi_theta(k: u8, z: Complex64, tau: Complex64) -> Result<Complex64> {
    if !(1..=4).contains(&k) {
        return Err(Error::InvalidThetaIndex(k));
    }
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(tau));
    }
    let i = Complex64::i();
    let half_integer = k == 1 || k == 4;
    let mut sum = if half_integer { Complex64::new(0.0, 0.0) } else { Complex64::new(1.0, 0.0) };
    let peak = (z.im.abs() / tau.im).ceil() + 1.0;
    for n in 0..TERM_CAP {
        let (m, start) = if half_integer { (n as f64 + 0.5, 0) } else { (n as f64, 1) };
        if n < start {
            continue;
        }
        let qpow = (i * PI * tau * m * m).exp();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let arg = 2.0 * PI * m * z;
        let term = 2.0
            * qpow
            * match k {
                1 => arg.cos(),
                2 => sign * arg.cos(),
                3 => arg.cos(),
                _ => sign * arg.sin(),
            };
        sum += term;
        if m > peak && term.norm() < 1e-18 * sum.norm().max(1.0) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what: "Jacobi theta series", cap: TERM_CAP })
}

/// The odd Jacobi theta (index 4 of [`jacobi_theta`]).
pub fn theta_odd(z: Complex64, tau: Complex64) -> Result<Complex64> {
    jacobi_theta(4, z, tau)
}
