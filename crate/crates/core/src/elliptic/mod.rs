//! Genus-one theta functions and Weierstrass data, normalized to the
//! lattice `Z + Z tau` (`2 omega_1 = 1`, `2 omega_2 = tau`).

pub mod theta;
pub mod weierstrass;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qseries::eisenstein_value;

pub use theta::{
    jacobi_theta, log_theta_second, theta_char, theta_char_jet, theta_constant_log_second,
    theta_odd, ThetaChar, ThetaJet,
};
pub use weierstrass::{g2_eisenstein, half_periods, reduce, wp, wp_prime, wp_regular};

/// Tolerance used when a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-14;

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularPoint {
    tau: Complex64,
}

impl ModularPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::NotInUpperHalfPlane(tau));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// Theta nome `exp(i pi tau)`.
    pub fn theta_nome(&self) -> Complex64 {
        (Complex64::i() * PI * self.tau).exp()
    }

    /// Modular nome `exp(2 pi i tau)`.
    pub fn nome(&self) -> Complex64 {
        let q = self.theta_nome();
        q * q
    }

    pub fn half_periods(&self) -> [Complex64; 3] {
        half_periods(self.tau)
    }
}

/// Values of `p` at the half-periods together with the invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticConstants {
    pub e: [Complex64; 3],
    pub g2: Complex64,
    pub g3: Complex64,
    /// `zeta(omega_1)`; with `omega_1 = 1/2` it equals `pi^2 E2 / 6`.
    pub eta1: Complex64,
}

impl EllipticConstants {
    pub fn e_sum(&self) -> Complex64 {
        self.e.iter().sum()
    }

    /// `4x^3 - g2 x - g3` at `x`.
    pub fn cubic(&self, x: Complex64) -> Complex64 {
        4.0 * x * x * x - self.g2 * x - self.g3
    }
}

/// `e_k = p(omega_k)`, `g2 = (4/3) pi^4 E4`, `g3 = (8/27) pi^6 E6` and
/// `eta_1 = G2 / 2`, the latter summed from the lattice.
pub fn elliptic_constants(tau: Complex64) -> Result<EllipticConstants> {
    let point = ModularPoint::new(tau)?;
    let mut e = [Complex64::new(0.0, 0.0); 3];
    for (slot, omega) in e.iter_mut().zip(point.half_periods()) {
        *slot = wp(omega, tau, DEFAULT_TOL)?;
    }
    let g2 = 4.0 / 3.0 * PI.powi(4) * eisenstein_value(4, tau)?;
    let g3 = 8.0 / 27.0 * PI.powi(6) * eisenstein_value(6, tau)?;
    let eta1 = g2_eisenstein(tau, DEFAULT_TOL)? / 2.0;
    Ok(EllipticConstants { e, g2, g3, eta1 })
}

/// Right-hand side of the Riccati equation satisfied by each `e_k` in `tau`:
/// `(i/pi)(-e^2 + (pi^2/3) E2 e + (2/9) pi^4 E4)`.
pub fn riccati_rhs(e: Complex64, tau: Complex64) -> Result<Complex64> {
    let e2 = eisenstein_value(2, tau)?;
    let e4 = eisenstein_value(4, tau)?;
    let inner = -e * e + PI * PI / 3.0 * e2 * e + 2.0 / 9.0 * PI.powi(4) * e4;
    Ok(Complex64::new(0.0, 1.0 / PI) * inner)
}

/// Half-period roots `e_k` of the lattice `2 omega_1 Z + 2 omega_2 Z`,
/// obtained from the normalized lattice by homogeneity
/// `e_k(lambda L) = lambda^-2 e_k(L)` with `lambda = 2 omega_1`.
pub fn lattice_roots(omega1: Complex64, omega2: Complex64) -> Result<[Complex64; 3]> {
    if omega1.norm() == 0.0 {
        return Err(Error::LatticePoint(omega1));
    }
    let mut tau = omega2 / omega1;
    if tau.im < 0.0 {
        // p(omega_2) = p(-omega_2) and omega_1 - omega_2 is congruent to omega_3.
        tau = -tau;
    }
    let scale = 2.0 * omega1;
    let base = elliptic_constants(tau)?;
    Ok(base.e.map(|e| e / (scale * scale)))
}
