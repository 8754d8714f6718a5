//! Polynomial vector fields, generic over the coefficient field so the same
//! code runs in exact rationals (for symbolic identities) and in `Complex64`.
//!
//! Each system is autonomous; the comment on each function names the time
//! variable it is written in.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Field;

pub type State3<T = Complex64> = [T; 3];
pub type State4<T = Complex64> = [T; 4];

fn r<T: Field>(num: i64, den: i64) -> T {
    T::ratio(num, den)
}

fn pow<T: Field>(x: &T, n: u32) -> T {
    (0..n).fold(T::int(1), |acc, _| acc * x.clone())
}

/// Ramanujan system for `(E2, E4, E6)` in `t = -2 pi i tau`.
pub fn ramanujan_rhs<T: Field>(s: &State3<T>) -> State3<T> {
    let [x, y, z] = s.clone();
    [
        r::<T>(1, 12) * (y.clone() - x.clone() * x.clone()),
        r::<T>(1, 3) * (z.clone() - x.clone() * y.clone()),
        r::<T>(1, 2) * (y.clone() * y - x * z),
    ]
}

/// Rescaled system, satisfied by `(pi^2 E2/12, pi^4 E4/12, pi^6 E6/216)`
/// in `t = (4i/pi) tau`.
pub fn rescaled_rhs<T: Field>(s: &State3<T>) -> State3<T> {
    let [x, y, z] = s.clone();
    [
        r::<T>(1, 2) * x.clone() * x.clone() - r::<T>(1, 24) * y.clone(),
        r::<T>(2, 1) * x.clone() * y.clone() - r::<T>(3, 1) * z.clone(),
        r::<T>(3, 1) * x * z - r::<T>(1, 6) * y.clone() * y,
    ]
}

/// Darboux-Halphen system in `tau`: `N1' = -N1 (N2 + N3) + N2 N3`, cyclically.
pub fn halphen_rhs<T: Field>(s: &State3<T>) -> State3<T> {
    let f = |a: &T, b: &T, c: &T| -(a.clone() * (b.clone() + c.clone())) + b.clone() * c.clone();
    [f(&s[0], &s[1], &s[2]), f(&s[1], &s[2], &s[0]), f(&s[2], &s[0], &s[1])]
}

/// Halphen system in the symmetric form `d(X_i + X_j)/dt = X_i X_j`, solved for
/// the derivatives: `X_i' = (X_i (X_j + X_k) - X_j X_k) / 2`.
pub fn symmetric_halphen_rhs<T: Field>(s: &State3<T>) -> State3<T> {
    let f = |a: &T, b: &T, c: &T| {
        r::<T>(1, 2) * (a.clone() * (b.clone() + c.clone()) - b.clone() * c.clone())
    };
    [f(&s[0], &s[1], &s[2]), f(&s[1], &s[2], &s[0]), f(&s[2], &s[0], &s[1])]
}

/// First-order form of `gamma''' = 6 gamma gamma'' - 9 gamma'^2` on `(gamma, gamma', gamma'')`.
pub fn chazy_rhs<T: Field>(s: &State3<T>) -> State3<T> {
    let [g, g1, g2] = s.clone();
    [
        g1.clone(),
        g2.clone(),
        r::<T>(6, 1) * g * g2 - r::<T>(9, 1) * g1.clone() * g1,
    ]
}

/// Map from the symmetric Halphen variables to the rescaled ones.
pub fn substitution_s5<T: Field>(s: &State3<T>) -> State3<T> {
    let [a, b, c] = s.clone();
    let x = r::<T>(1, 3) * (a.clone() + b.clone() + c.clone());
    let y = r::<T>(4, 3)
        * (a.clone() * a.clone() + b.clone() * b.clone() + c.clone() * c.clone()
            - a.clone() * b.clone()
            - b.clone() * c.clone()
            - c.clone() * a.clone());
    let two = r::<T>(2, 1);
    let z = r::<T>(4, 27)
        * (two.clone() * a.clone() - b.clone() - c.clone())
        * (two.clone() * b.clone() - c.clone() - a.clone())
        * (two * c - a - b);
    [x, y, z]
}

/// The contact Hamiltonian `F = q1^2 p1 / 2 - p1^2 p2^8 / 48 + 3 q1 q2 p2` with
/// `q1 = x1`, `q2 = z1`, `p1 = lambda y1`, `p2 = lambda`.
pub fn hamiltonian_f<T: Field>(s: &State4<T>) -> T {
    let [x, y, z, l] = s.clone();
    let p1 = l.clone() * y;
    r::<T>(1, 2) * x.clone() * x.clone() * p1.clone() - r::<T>(1, 48) * p1.clone() * p1 * pow(&l, 8)
        + r::<T>(3, 1) * x * z * l
}

/// Hamilton's equations of [`hamiltonian_f`] written back in `(x1, y1, z1, lambda)`.
pub fn lifted_rhs<T: Field>(s: &State4<T>) -> Result<State4<T>> {
    let [x, y, z, l] = s.clone();
    if l.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let l9 = pow(&l, 9);
    Ok([
        r::<T>(1, 2) * x.clone() * x.clone() - r::<T>(1, 24) * l9.clone() * y.clone(),
        r::<T>(2, 1) * x.clone() * y.clone() - r::<T>(3, 1) * z.clone(),
        -(r::<T>(1, 6) * l9 * y.clone() * y) + r::<T>(3, 1) * x.clone() * z,
        -(r::<T>(3, 1) * l * x),
    ])
}

/// The systems the integrator and the CLI know about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    Ramanujan,
    Rescaled,
    Halphen,
    Chazy,
    Lifted,
}

impl System {
    pub const ALL: [System; 5] =
        [System::Ramanujan, System::Rescaled, System::Halphen, System::Chazy, System::Lifted];

    pub fn name(self) -> &'static str {
        match self {
            System::Ramanujan => "ramanujan",
            System::Rescaled => "rescaled",
            System::Halphen => "halphen",
            System::Chazy => "chazy",
            System::Lifted => "lifted",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn dim(self) -> usize {
        if self == System::Lifted {
            4
        } else {
            3
        }
    }

    /// `dt/dtau` for the system's own time variable.
    pub fn time_scale(self) -> Complex64 {
        use std::f64::consts::PI;
        match self {
            System::Ramanujan => Complex64::new(0.0, -2.0 * PI),
            System::Rescaled | System::Lifted => Complex64::new(0.0, 4.0 / PI),
            System::Halphen | System::Chazy => Complex64::new(1.0, 0.0),
        }
    }

    /// The system's own time at `tau`, with `t = 0` at `tau = 0`.
    pub fn time_of(self, tau: Complex64) -> Complex64 {
        self.time_scale() * tau
    }

    /// The modular solution of the system at `tau`, from series truncated at
    /// `order`: `(E2, E4, E6)`, its rescaling, the Halphen roots, or
    /// `(gamma, gamma', gamma'')`. The lifted system has no such point.
    pub fn series_state(self, tau: Complex64, order: usize) -> Result<Vec<Complex64>> {
        use crate::qseries::eisenstein;
        use std::f64::consts::PI;
        let eval = |w: u32| -> Result<Complex64> { Ok(eisenstein(w, order)?.eval(tau)?.value) };
        Ok(match self {
            System::Ramanujan => vec![eval(2)?, eval(4)?, eval(6)?],
            System::Rescaled => vec![
                PI.powi(2) * eval(2)? / 12.0,
                PI.powi(4) * eval(4)? / 12.0,
                PI.powi(6) * eval(6)? / 216.0,
            ],
            System::Halphen => crate::frobenius::GammaSeries::new(order)?.halphen_roots(tau)?.to_vec(),
            System::Chazy => crate::frobenius::gamma_data(tau, order)?.g[..3].to_vec(),
            System::Lifted => {
                return Err(Error::InvalidConfig("the lifted system has no series initial data"))
            }
        })
    }

    pub fn eval(self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: y.len() });
        }
        let s3 = || [y[0], y[1], y[2]];
        Ok(match self {
            System::Ramanujan => ramanujan_rhs(&s3()).to_vec(),
            System::Rescaled => rescaled_rhs(&s3()).to_vec(),
            System::Halphen => halphen_rhs(&s3()).to_vec(),
            System::Chazy => chazy_rhs(&s3()).to_vec(),
            System::Lifted => lifted_rhs(&[y[0], y[1], y[2], y[3]])?.to_vec(),
        })
    }
}
