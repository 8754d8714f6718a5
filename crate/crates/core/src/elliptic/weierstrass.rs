//! Weierstrass `p` for the lattice `Z + Z tau` (half-periods `1/2`, `tau/2`).
//!
//! The lattice sum is ordered by rows `n tau + Z`. Each row is summed in
//! closed form with `sum_m (w + m)^-2 = pi^2 / sin^2(pi w)`, which leaves a
//! geometrically convergent sum over `n`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ROW_CAP: usize = 400;
/// Arguments closer than this to a lattice point are rejected.
const LATTICE_GUARD: f64 = 1e-12;
/// Below this radius `p(u) - 1/u^2` uses the Laurent tail of the row `n = 0`.
const SMALL_U: f64 = 0.05;

fn check(tau: Complex64, tol: f64) -> Result<()> {
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(tau));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

/// Representative of `u` modulo `Z + Z tau` near the origin.
pub fn reduce(u: Complex64, tau: Complex64) -> Complex64 {
    let n = (u.im / tau.im).round();
    let v = u - n * tau;
    v - v.re.round()
}

/// `pi^2 / sin^2(pi w)` and its `w`-derivative, written through
/// `p = exp(+-2 pi i w)` so that large `|Im w|` decays instead of overflowing.
fn row(w: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let (p, sign) = if w.im >= 0.0 {
        ((2.0 * PI * i * w).exp(), 1.0)
    } else {
        ((-2.0 * PI * i * w).exp(), -1.0)
    };
    let one_minus = 1.0 - p;
    let value = -4.0 * PI * PI * p / (one_minus * one_minus);
    let deriv = sign * (-8.0 * PI.powi(3)) * i * p * (1.0 + p) / (one_minus * one_minus * one_minus);
    (value, deriv)
}

/// `G2(tau) = sum_n sum'_m (m + n tau)^-2` in Eisenstein order. With the
/// half-period `omega_1 = 1/2` this is `eta_1 / omega_1`.
pub fn g2_eisenstein(tau: Complex64, tol: f64) -> Result<Complex64> {
    check(tau, tol)?;
    let mut sum = Complex64::new(PI * PI / 3.0, 0.0);
    for n in 1..=ROW_CAP {
        let (v, _) = row(n as f64 * tau);
        sum += 2.0 * v;
        if v.norm() < tol * 1e-3 * sum.norm().max(1.0) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what: "G2 row sum", cap: ROW_CAP })
}

/// Sum of rows `n != 0` of `pi^2/sin^2` and of its derivative, at a reduced argument.
fn off_rows(u: Complex64, tau: Complex64, tol: f64) -> Result<(Complex64, Complex64)> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for n in 1..=ROW_CAP {
        let shift = n as f64 * tau;
        let (a, da) = row(u + shift);
        let (b, db) = row(u - shift);
        value += a + b;
        deriv += da + db;
        let size = a.norm() + b.norm() + da.norm() + db.norm();
        if size < tol * 1e-3 * value.norm().max(1.0) {
            return Ok((value, deriv));
        }
    }
    Err(Error::NonConvergence { what: "Weierstrass row sum", cap: ROW_CAP })
}

fn reduced_nonlattice(u: Complex64, tau: Complex64) -> Result<Complex64> {
    let r = reduce(u, tau);
    if r.norm() < LATTICE_GUARD {
        return Err(Error::LatticePoint(u));
    }
    Ok(r)
}

/// `p(u; 1/2, tau/2)`.
pub fn wp(u: Complex64, tau: Complex64, tol: f64) -> Result<Complex64> {
    check(tau, tol)?;
    let r = reduced_nonlattice(u, tau)?;
    let (centre, _) = row(r);
    let (rest, _) = off_rows(r, tau, tol)?;
    Ok(centre + rest - g2_eisenstein(tau, tol)?)
}

/// `p'(u; 1/2, tau/2)`.
pub fn wp_prime(u: Complex64, tau: Complex64, tol: f64) -> Result<Complex64> {
    check(tau, tol)?;
    let r = reduced_nonlattice(u, tau)?;
    let (_, centre) = row(r);
    let (_, rest) = off_rows(r, tau, tol)?;
    Ok(centre + rest)
}

/// `pi^2/sin^2(pi x) - 1/x^2` by its Taylor series, for small `|x|`.
fn csc2_regular(x: Complex64) -> Complex64 {
    const COEFFS: [f64; 7] = [
        1.0 / 3.0,
        1.0 / 15.0,
        2.0 / 189.0,
        1.0 / 675.0,
        2.0 / 10395.0,
        1382.0 / 58046625.0,
        4.0 / 1403325.0,
    ];
    let y2 = (PI * x) * (PI * x);
    let poly = COEFFS.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * y2 + c);
    PI * PI * poly
}

/// The regular part `p(u) - 1/u^2`, accurate near (and at) `u = 0`.
/// `u` is not reduced: the subtracted pole is the one at the origin.
pub fn wp_regular(u: Complex64, tau: Complex64, tol: f64) -> Result<Complex64> {
    check(tau, tol)?;
    if u.norm() >= SMALL_U {
        return Ok(wp(u, tau, tol)? - 1.0 / (u * u));
    }
    let (rest, _) = off_rows(u, tau, tol)?;
    Ok(csc2_regular(u) + rest - g2_eisenstein(tau, tol)?)
}

/// Half-periods `(omega_1, omega_2, omega_3) = (1/2, tau/2, (1 + tau)/2)`.
pub fn half_periods(tau: Complex64) -> [Complex64; 3] {
    [Complex64::new(0.5, 0.0), tau / 2.0, (1.0 + tau) / 2.0]
}
