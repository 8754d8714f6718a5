//! The Euler-top type system in the cross-ratio `s` of the Halphen roots and
//! its explicit solution in terms of those roots.

use num_complex::Complex64;

use crate::dynamics::cubic::match_roots;
use crate::error::{Error, Result};
use crate::numeric::{derivative_vec, TAU_STEP};

use super::Frobenius;

/// Values of `s` closer than this to 0 or 1 are rejected.
const S_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaState {
    pub omega: [Complex64; 3],
    /// `s = (N3 - N1) / (N2 - N1)`.
    pub s: Complex64,
    /// `(N2-N1)(N1-N3)`, `(N3-N2)(N2-N1)`, `(N1-N3)(N3-N2)`.
    pub radicands: [Complex64; 3],
    /// Whether the third square root had to be negated to satisfy the branch rule.
    pub third_root_negated: bool,
}

/// `Omega_k = N_k / (2 r_k)` with `r_k^2` the k-th radicand.
///
/// Branch rule: `r_1`, `r_2` are principal square roots and `r_3` is the one
/// for which `r_1 r_2 r_3 = (N2-N1)(N1-N3)(N3-N2)`. Under this rule the
/// system is satisfied with `dOmega_1/ds = Omega_2 Omega_3 / s`; the opposite
/// choice of `r_3` flips the sign of every residual.
pub fn omega_from_roots(n: &[Complex64; 3]) -> Result<OmegaState> {
    let [n1, n2, n3] = *n;
    let d21 = n2 - n1;
    if d21.norm() == 0.0 {
        return Err(Error::CoalescingCoordinates("N1 = N2"));
    }
    let s = (n3 - n1) / d21;
    if s.norm() < S_GUARD || (s - 1.0).norm() < S_GUARD {
        return Err(Error::DegenerateOmegaParameter(s));
    }
    let radicands = [d21 * (n1 - n3), (n3 - n2) * d21, (n1 - n3) * (n3 - n2)];
    let r1 = radicands[0].sqrt();
    let r2 = radicands[1].sqrt();
    let mut r3 = radicands[2].sqrt();
    let target = d21 * (n1 - n3) * (n3 - n2);
    let third_root_negated = (r1 * r2 * r3 - target).norm() > (r1 * r2 * r3 + target).norm();
    if third_root_negated {
        r3 = -r3;
    }
    let r = [r1, r2, r3];
    let omega = [0, 1, 2].map(|k| n[k] / (2.0 * r[k]));
    Ok(OmegaState { omega, s, radicands, third_root_negated })
}

/// Residuals of the Omega system at one point, from finite differences in `t3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaResiduals {
    /// `|dOmega_k/ds - rhs_k|` with `dOmega_1/ds = Omega_2 Omega_3 / s`.
    pub corrected: [f64; 3],
    /// `|dOmega_1/ds - Omega_2^2 / s|`.
    pub literal_first: f64,
    /// `|2 (dt3/ds) (N1-N3)(N2-N3)/(N2-N1) - 1|`.
    pub identity: f64,
}

impl OmegaResiduals {
    pub fn max_corrected(&self) -> f64 {
        self.corrected.iter().copied().fold(0.0, f64::max)
    }
}

/// Omega states along a path, with samples where a radicand crosses the
/// negative real axis (the principal square root jumps there) flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaPath {
    pub taus: Vec<Complex64>,
    pub states: Vec<OmegaState>,
    pub flagged: Vec<usize>,
}

fn crosses_cut(a: Complex64, b: Complex64) -> bool {
    a.re < 0.0 && b.re < 0.0 && (a.im >= 0.0) != (b.im >= 0.0)
}

impl Frobenius {
    /// Omega state at `t3` with the default root labelling.
    pub fn omega(&self, t3: Complex64) -> Result<OmegaState> {
        omega_from_roots(&self.gamma_series().halphen_roots(t3)?)
    }

    fn roots_near(&self, t3: Complex64, base: &[Complex64; 3]) -> Result<[Complex64; 3]> {
        match_roots(base, &self.gamma_series().halphen_roots(t3)?, 0)
    }

    pub fn omega_residuals(&self, t3: Complex64) -> Result<OmegaResiduals> {
        let base = self.gamma_series().halphen_roots(t3)?;
        let state = omega_from_roots(&base)?;
        // (Omega_1, Omega_2, Omega_3, s) as a function of t3, on continued roots.
        let f = |tau: Complex64| -> [Complex64; 4] {
            let roots = self.roots_near(tau, &base).unwrap_or([Complex64::new(f64::NAN, 0.0); 3]);
            match omega_from_roots(&roots) {
                Ok(st) => [st.omega[0], st.omega[1], st.omega[2], st.s],
                Err(_) => [Complex64::new(f64::NAN, 0.0); 4],
            }
        };
        let d = derivative_vec(f, t3, TAU_STEP);
        if d.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::DegenerateOmegaParameter(state.s));
        }
        let ds = d[3];
        if ds.norm() == 0.0 {
            return Err(Error::DegenerateOmegaParameter(state.s));
        }
        let [o1, o2, o3] = state.omega;
        let s = state.s;
        let dods = [d[0] / ds, d[1] / ds, d[2] / ds];
        let corrected = [
            (dods[0] - o2 * o3 / s).norm(),
            (dods[1] + o1 * o3 / (s - 1.0)).norm(),
            (dods[2] - o1 * o2 / (s * (s - 1.0))).norm(),
        ];
        let literal_first = (dods[0] - o2 * o2 / s).norm();
        let [n1, n2, n3] = base;
        let identity = (2.0 / ds * (n1 - n3) * (n2 - n3) / (n2 - n1) - 1.0).norm();
        Ok(OmegaResiduals { corrected, literal_first, identity })
    }

    /// Omega states along `path`, with root labels continued from the first sample.
    pub fn omega_path(&self, path: &[Complex64]) -> Result<OmegaPath> {
        let first = *path.first().ok_or(Error::InvalidPath)?;
        let mut roots = self.gamma_series().halphen_roots(first)?;
        let mut states: Vec<OmegaState> = Vec::with_capacity(path.len());
        let mut flagged = Vec::new();
        for (n, &tau) in path.iter().enumerate() {
            if n > 0 {
                roots = match_roots(&roots, &self.gamma_series().halphen_roots(tau)?, n)?;
            }
            let st = omega_from_roots(&roots)?;
            if let Some(prev) = states.last() {
                if (0..3).any(|k| crosses_cut(prev.radicands[k], st.radicands[k])) {
                    flagged.push(n);
                }
            }
            states.push(st);
        }
        Ok(OmegaPath { taus: path.to_vec(), states, flagged })
    }
}
