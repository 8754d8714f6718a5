//! The Chazy solution `gamma = (pi i / 3) E2` and its `tau`-derivatives.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::cubic::cubic_roots;
use crate::error::{Error, Result};
use crate::qseries::{eisenstein, horner, nome};

/// `gamma, gamma', gamma'', gamma'''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaData {
    pub g: [Complex64; 4],
}

impl GammaData {
    /// `gamma''' - 6 gamma gamma'' + 9 gamma'^2`.
    pub fn chazy_residual(&self) -> Complex64 {
        let [g0, g1, g2, g3] = self.g;
        g3 - 6.0 * g0 * g2 + 9.0 * g1 * g1
    }
}

/// Float coefficients of `D^k E2` for `k = 0..=3`, ready for repeated
/// evaluation. `gamma^(k) = (pi i / 3) (2 pi i)^k D^k E2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSeries {
    coeffs: [Vec<f64>; 4],
}

impl GammaSeries {
    pub fn new(order: usize) -> Result<Self> {
        let e2 = eisenstein(2, order)?;
        let d1 = e2.derive();
        let d2 = d1.derive();
        let d3 = d2.derive();
        Ok(Self {
            coeffs: [e2.float_coeffs(), d1.float_coeffs(), d2.float_coeffs(), d3.float_coeffs()],
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn eval(&self, tau: Complex64) -> Result<GammaData> {
        let q = nome(tau)?;
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut factor = Complex64::new(0.0, PI / 3.0);
        let mut g = [Complex64::new(0.0, 0.0); 4];
        for (slot, c) in g.iter_mut().zip(&self.coeffs) {
            *slot = factor * horner(c, q);
            factor *= two_pi_i;
        }
        Ok(GammaData { g })
    }

    /// Roots of the Chazy cubic at `tau`, sorted by the default labelling rule.
    pub fn halphen_roots(&self, tau: Complex64) -> Result<[Complex64; 3]> {
        let d = self.eval(tau)?;
        cubic_roots(d.g[0], d.g[1], d.g[2])
    }
}

/// `(gamma, gamma', gamma'', gamma''')` at `t3` from the series truncated at `order`.
pub fn gamma_data(t3: Complex64, order: usize) -> Result<GammaData> {
    if !(t3.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(t3));
    }
    GammaSeries::new(order)?.eval(t3)
}

/// The Halphen roots written through Weierstrass data:
/// `N_k = -(pi i / 6) E2 - (i / (2 pi)) e_k`, in half-period order.
pub fn halphen_closed_form(tau: Complex64) -> Result<[Complex64; 3]> {
    let k = crate::elliptic::elliptic_constants(tau)?;
    let e2 = crate::qseries::eisenstein_value(2, tau)?;
    let base = Complex64::new(0.0, -PI / 6.0) * e2;
    let coef = Complex64::new(0.0, -1.0 / (2.0 * PI));
    Ok(k.e.map(|e| base + coef * e))
}
