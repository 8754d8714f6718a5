//! The three-dimensional Frobenius manifold with potential
//! `F = t1^2 t3 / 2 + t1 t2^2 / 2 - t2^4 gamma(t3) / 16`, metric
//! `eta = dt2^2 + 2 dt1 dt3`, and canonical coordinates built from the
//! Halphen roots.

pub mod gamma;
pub mod omega;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::dynamics::cubic::match_roots;
use crate::dynamics::systems::halphen_rhs;
use crate::error::{Error, Result};
use crate::numeric::{z_step, TAU_STEP};

pub use gamma::{gamma_data, halphen_closed_form, GammaData, GammaSeries};
pub use omega::{omega_from_roots, OmegaPath, OmegaResiduals, OmegaState};

pub type Matrix3C = Matrix3<Complex64>;

/// Minimum separation of canonical coordinates relative to their size.
pub const DISTINCT_GAP: f64 = 1e-10;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `eta_ij` in the order `(t1, t2, t3)`; it is its own inverse.
pub fn eta() -> Matrix3C {
    Matrix3C::new(zero(), zero(), one(), zero(), one(), zero(), one(), zero(), zero())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatPoint {
    pub t1: Complex64,
    pub t2: Complex64,
    pub t3: Complex64,
}

impl FlatPoint {
    pub fn new(t1: Complex64, t2: Complex64, t3: Complex64) -> Result<Self> {
        if !(t3.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane(t3));
        }
        Ok(Self { t1, t2, t3 })
    }

    pub fn coords(&self) -> [Complex64; 3] {
        [self.t1, self.t2, self.t3]
    }

    fn with(&self, i: usize, value: Complex64) -> Self {
        let mut c = self.coords();
        c[i] = value;
        Self { t1: c[0], t2: c[1], t3: c[2] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalPoint {
    pub u: [Complex64; 3],
    /// The Halphen roots `N_k(t3)` the coordinates were built from.
    pub roots: [Complex64; 3],
}

/// `C_ij^k`, stored densely as `c[i][j][k]` with zero-based indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureTensor {
    pub c: [[[Complex64; 3]; 3]; 3],
}

impl StructureTensor {
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.c[i][j][k]
    }

    /// Product of two vectors in the algebra spanned by `e_1, e_2, e_3`.
    pub fn product(&self, a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
        let mut out = [zero(); 3];
        for i in 0..3 {
            for j in 0..3 {
                let w = a[i] * b[j];
                if w == zero() {
                    continue;
                }
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot += w * self.c[i][j][k];
                }
            }
        }
        out
    }

    /// Largest `|(e_a e_b) e_c - e_a (e_b e_c)|` over all basis triples.
    pub fn associativity_residual(&self) -> f64 {
        let basis = |i: usize| {
            let mut v = [zero(); 3];
            v[i] = one();
            v
        };
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let left = self.product(&self.product(&basis(a), &basis(b)), &basis(c));
                    let right = self.product(&basis(a), &self.product(&basis(b), &basis(c)));
                    for k in 0..3 {
                        worst = worst.max((left[k] - right[k]).norm());
                    }
                }
            }
        }
        worst
    }

    /// Largest deviation from `C_1j^k = delta_j^k`.
    pub fn unity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..3 {
            for k in 0..3 {
                let want = if j == k { one() } else { zero() };
                worst = worst.max((self.c[0][j][k] - want).norm());
            }
        }
        worst
    }
}

/// Monic cubic `u^3 + c2 u^2 + c1 u + c0`, stored low to high.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPoly {
    pub coeffs: [Complex64; 4],
}

impl CharPoly {
    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(zero(), |acc, &c| acc * u + c)
    }

    /// `sum_j |c_j| |u|^j`, the natural size against which `eval(u)` is judged.
    pub fn scale_at(&self, u: Complex64) -> f64 {
        let r = u.norm();
        self.coeffs.iter().enumerate().map(|(j, c)| c.norm() * r.powi(j as i32)).sum()
    }
}

/// `d/du_i` in the `d/dt` basis, together with its checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeOfBasis {
    /// Closed-form matrix; row `i` holds the components of `d/du_i`.
    pub matrix: Matrix3C,
    /// Inverse transpose of the analytic Jacobian `du_i/dt_a`.
    pub jacobian_inverse: Matrix3C,
    /// `max |M J_fd^T - I|` with a finite-difference Jacobian.
    pub oracle_deviation: f64,
    /// Deviation of the third-row first-column entry when the printed
    /// two-term expression (with the factor `N3 - N2` repeated) is used.
    pub literal_z_deviation: f64,
}

/// The Frobenius structure with `gamma` read from a truncated `E2` series.
#[derive(Debug, Clone, PartialEq)]
pub struct Frobenius {
    gamma: GammaSeries,
}

impl Frobenius {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Self { gamma: GammaSeries::new(order)? })
    }

    pub fn gamma(&self, t3: Complex64) -> Result<GammaData> {
        self.gamma.eval(t3)
    }

    pub fn gamma_series(&self) -> &GammaSeries {
        &self.gamma
    }

    pub fn potential(&self, p: &FlatPoint) -> Result<Complex64> {
        let g = self.gamma(p.t3)?.g[0];
        let t2sq = p.t2 * p.t2;
        Ok(0.5 * p.t1 * p.t1 * p.t3 + 0.5 * p.t1 * t2sq - t2sq * t2sq * g / 16.0)
    }

    /// All third derivatives `F_ijk` in closed form.
    pub fn third_derivatives(&self, p: &FlatPoint) -> Result<[[[Complex64; 3]; 3]; 3]> {
        let [g0, g1, g2, g3] = self.gamma(p.t3)?.g;
        let t2 = p.t2;
        let t2sq = t2 * t2;
        let mut f = [[[zero(); 3]; 3]; 3];
        let mut set = |idx: [usize; 3], v: Complex64| {
            let [a, b, c] = idx;
            for (i, j, k) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                f[i][j][k] = v;
            }
        };
        set([0, 0, 2], one());
        set([0, 1, 1], one());
        set([1, 1, 1], -1.5 * t2 * g0);
        set([1, 1, 2], -0.75 * t2sq * g1);
        set([1, 2, 2], -0.25 * t2sq * t2 * g2);
        set([2, 2, 2], -t2sq * t2sq * g3 / 16.0);
        Ok(f)
    }

    /// `C_ij^k = eta^kl F_ijl`.
    pub fn structure_constants(&self, p: &FlatPoint) -> Result<StructureTensor> {
        let f = self.third_derivatives(p)?;
        let mut c = [[[zero(); 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    // eta^{kl} is 1 exactly when l = 2 - k.
                    c[i][j][k] = f[i][j][2 - k];
                }
            }
        }
        Ok(StructureTensor { c })
    }

    pub fn associativity_residual(&self, p: &FlatPoint) -> Result<f64> {
        Ok(self.structure_constants(p)?.associativity_residual())
    }

    /// Closed-form intersection form `g^ij`.
    pub fn intersection_form(&self, p: &FlatPoint) -> Result<Matrix3C> {
        let [g0, g1, g2, _] = self.gamma(p.t3)?.g;
        let (t1, t2) = (p.t1, p.t2);
        let t2sq = t2 * t2;
        let g11 = -0.125 * g2 * t2sq * t2sq;
        let g12 = -0.375 * t2sq * t2 * g1;
        let g22 = t1 - 0.75 * t2sq * g0;
        let g23 = 0.5 * t2;
        Ok(Matrix3C::new(g11, g12, t1, g12, g22, g23, t1, g23, zero()))
    }

    /// `g^ij = E^l C_l^ij` with `C_l^ij = eta^im C_ml^j` and Euler field
    /// `E = t1 d/dt1 + (t2/2) d/dt2`, contracted from the structure tensor.
    pub fn intersection_form_contracted(&self, p: &FlatPoint) -> Result<Matrix3C> {
        let c = self.structure_constants(p)?;
        let euler = [p.t1, 0.5 * p.t2, zero()];
        let mut g = Matrix3C::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = zero();
                for (l, e) in euler.iter().enumerate() {
                    acc += e * c.get(2 - i, l, j);
                }
                g[(i, j)] = acc;
            }
        }
        Ok(g)
    }

    /// `det(g - u eta)` as a monic cubic in `u`.
    pub fn char_poly(&self, p: &FlatPoint) -> Result<CharPoly> {
        let [g0, g1, g2, _] = self.gamma(p.t3)?.g;
        let (t1, t2) = (p.t1, p.t2);
        let t2sq = t2 * t2;
        let t2_4 = t2sq * t2sq;
        let c2 = -3.0 * t1 + 0.75 * g0 * t2sq;
        let c1 = 3.0 * t1 * t1 - 1.5 * t1 * t2sq * g0 + 0.375 * t2_4 * g1;
        let c0 = -t1 * t1 * t1 + 0.75 * t1 * t1 * t2sq * g0 - 0.375 * t2_4 * t1 * g1
            + t2_4 * t2sq * g2 / 32.0;
        Ok(CharPoly { coeffs: [c0, c1, c2, one()] })
    }

    /// `u_k = t1 + t2^2 N_k(t3) / 2`.
    pub fn canonical_coords(&self, p: &FlatPoint) -> Result<CanonicalPoint> {
        if p.t2 == zero() {
            return Err(Error::CoalescingCoordinates("t2 = 0 collapses all u_k to t1"));
        }
        let roots = self.gamma.halphen_roots(p.t3)?;
        Ok(CanonicalPoint { u: canonical_from_roots(p, &roots)?, roots })
    }

    /// Analytic `J[i][a] = du_i/dt_a = (1, t2 N_i, t2^2 N_i' / 2)`, where `N_i'`
    /// comes from the Halphen system.
    pub fn jacobian(&self, p: &FlatPoint, roots: &[Complex64; 3]) -> Matrix3C {
        let dn = halphen_rhs(roots);
        let mut j = Matrix3C::zeros();
        for i in 0..3 {
            j[(i, 0)] = one();
            j[(i, 1)] = p.t2 * roots[i];
            j[(i, 2)] = 0.5 * p.t2 * p.t2 * dn[i];
        }
        j
    }

    /// Finite-difference Jacobian of `(u_1, u_2, u_3)` with respect to
    /// `(t1, t2, t3)`, roots continued from `base`.
    pub fn jacobian_fd(&self, p: &FlatPoint, base: &[Complex64; 3]) -> Result<Matrix3C> {
        let coords = |q: &FlatPoint| -> Result<[Complex64; 3]> {
            let sorted = self.gamma.halphen_roots(q.t3)?;
            let roots = match_roots(base, &sorted, 0)?;
            canonical_from_roots(q, &roots)
        };
        let mut j = Matrix3C::zeros();
        for a in 0..3 {
            let x = p.coords()[a];
            let h = if a == 2 { TAU_STEP } else { z_step(x) };
            let central = |h: f64| -> Result<[Complex64; 3]> {
                let plus = coords(&p.with(a, x + h))?;
                let minus = coords(&p.with(a, x - h))?;
                Ok([0, 1, 2].map(|i| (plus[i] - minus[i]) / (2.0 * h)))
            };
            let coarse = central(h)?;
            let fine = central(h / 2.0)?;
            for i in 0..3 {
                j[(i, a)] = (4.0 * fine[i] - coarse[i]) / 3.0;
            }
        }
        Ok(j)
    }

    pub fn change_of_basis(&self, p: &FlatPoint) -> Result<ChangeOfBasis> {
        let cp = self.canonical_coords(p)?;
        let [n1, n2, n3] = cp.roots;
        let t2 = p.t2;
        let t2sq = t2 * t2;
        let t2cube = t2sq * t2;
        let denom = t2cube * (n2 - n1) * (n1 - n3) * (n2 - n3);
        if denom.norm() == 0.0 {
            return Err(Error::SingularJacobian);
        }
        let half = 0.5 * t2cube;
        let x = half * (n2 * n2 * (n1 - n3) - n3 * n3 * (n1 - n2));
        let y = half * (n1 * n1 * (n3 - n2) - n3 * n3 * (n1 - n2));
        let z = half * (n1 - n2) * (n1 * n3 + n2 * n3 - n1 * n2);
        let z_literal = half * (n1 * n1 * (n3 - n2) - n2 * n2 * (n3 - n2));
        let matrix = Matrix3C::new(
            x,
            t2sq * n1 * (n3 - n2),
            t2 * (n3 - n2),
            y,
            t2sq * n2 * (n1 - n3),
            t2 * (n1 - n3),
            z,
            t2sq * n3 * (n2 - n1),
            t2 * (n2 - n1),
        ) / denom;

        let jac = self.jacobian(p, &cp.roots);
        let jacobian_inverse =
            jac.transpose().try_inverse().ok_or(Error::SingularJacobian)?;
        let fd = self.jacobian_fd(p, &cp.roots)?;
        let product = matrix * fd.transpose();
        let oracle_deviation = (product - Matrix3C::identity()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(ChangeOfBasis {
            matrix,
            jacobian_inverse,
            oracle_deviation,
            literal_z_deviation: ((z_literal - z) / denom).norm(),
        })
    }
}

fn canonical_from_roots(p: &FlatPoint, roots: &[Complex64; 3]) -> Result<[Complex64; 3]> {
    let half_t2sq = 0.5 * p.t2 * p.t2;
    let u = roots.map(|n| p.t1 + half_t2sq * n);
    let size = u.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let gap = (u[0] - u[1]).norm().min((u[1] - u[2]).norm()).min((u[2] - u[0]).norm());
    if gap < DISTINCT_GAP * size {
        return Err(Error::CoalescingCoordinates("canonical coordinates are not separated"));
    }
    Ok(u)
}
