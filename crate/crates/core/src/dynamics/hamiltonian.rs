//! Hamiltonian utilities on a doubled phase space `(x_1..x_n, y_1..y_n)`.

use num_complex::Complex64;

use crate::dynamics::systems::{hamiltonian_f, State4};
use crate::error::{Error, Result};
use crate::numeric::z_step;

/// Central difference of `f` along coordinate `i`, Richardson-extrapolated once.
pub fn partial<F>(f: &F, point: &[Complex64], i: usize) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let h = z_step(point[i]);
    let mut p = point.to_vec();
    let mut central = |h: f64| {
        p[i] = point[i] + h;
        let plus = f(&p);
        p[i] = point[i] - h;
        let minus = f(&p);
        p[i] = point[i];
        (plus - minus) / (2.0 * h)
    };
    let coarse = central(h);
    let fine = central(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Finite-difference gradient of a scalar field.
pub fn gradient<F>(f: &F, point: &[Complex64]) -> Vec<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    (0..point.len()).map(|i| partial(f, point, i)).collect()
}

/// `{f, g} = sum_i (df/dx_i dg/dy_i - df/dy_i dg/dx_i)` at `point = (x, y)`.
///
/// # Panics
/// If `point` has odd length.
pub fn poisson_bracket<F, G>(f: &F, g: &G, point: &[Complex64]) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
    G: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    assert!(point.len() % 2 == 0, "phase space has even dimension");
    let n = point.len() / 2;
    let df = gradient(f, point);
    let dg = gradient(g, point);
    (0..n).map(|i| df[i] * dg[n + i] - df[n + i] * dg[i]).sum()
}

/// Lift of `x' = X(x)` to `H(x, y) = -sum_i y_i X_i(x)` on the doubled space.
/// Hamilton's equations `x' = -dH/dy` reproduce the original flow in the `x` slots.
pub fn hamiltonian_lift<V>(field: V) -> impl Fn(&[Complex64]) -> Complex64
where
    V: Fn(&[Complex64]) -> Vec<Complex64>,
{
    move |point: &[Complex64]| {
        let n = point.len() / 2;
        let (x, y) = point.split_at(n);
        -field(x).iter().zip(y).map(|(xi, yi)| xi * yi).sum::<Complex64>()
    }
}

/// The `x` components of the flow of a lifted Hamiltonian, recovered through
/// brackets with the coordinate functions: `x_k' = -{x_k, H}` under the sign
/// convention of [`poisson_bracket`].
pub fn lifted_flow<H>(h: &H, point: &[Complex64]) -> Vec<Complex64>
where
    H: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let n = point.len() / 2;
    (0..n)
        .map(|k| {
            let coord = move |p: &[Complex64]| p[k];
            -poisson_bracket(&coord, h, point)
        })
        .collect()
}

/// Hamilton's equations for a Hamiltonian in canonical coordinates
/// `(q_1..q_n, p_1..p_n)`: `q' = dH/dp`, `p' = -dH/dq`, by finite differences.
pub fn hamilton_field<H>(h: &H, point: &[Complex64]) -> Vec<Complex64>
where
    H: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let n = point.len() / 2;
    let grad = gradient(h, point);
    let mut out = Vec::with_capacity(point.len());
    out.extend_from_slice(&grad[n..]);
    out.extend(grad[..n].iter().map(|g| -g));
    out
}

/// Hamilton's equations of `F` in `(q1, q2, p1, p2) = (x1, z1, lambda y1, lambda)`,
/// by finite differences, pulled back to `(x1, y1, z1, lambda)`.
pub fn lifted_field_from_f(s: &State4) -> Result<State4> {
    let [x1, y1, z1, lambda] = *s;
    if lambda.norm() == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let f = |p: &[Complex64]| hamiltonian_f(&[p[0], p[2] / p[3], p[1], p[3]]);
    let v = hamilton_field(&f, &[x1, z1, lambda * y1, lambda]);
    let (dq1, dq2, dp1, dp2) = (v[0], v[1], v[2], v[3]);
    Ok([dq1, (dp1 - y1 * dp2) / lambda, dq2, dp2])
}
