//! Small numerical kernels shared by the modules: finite differences with a
//! single Richardson step, Cauchy-integral derivatives of holomorphic maps,
//! and Gauss-Legendre quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Step used for tau-derivatives of transcendental data.
pub const TAU_STEP: f64 = 1e-4;

/// Step used for second derivatives in finite-difference oracles.
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-3;

/// Step for first z-derivatives, scaled with the magnitude of the argument.
pub fn z_step(z: Complex64) -> f64 {
    1e-5 * z.norm().max(1.0)
}

/// Central first derivative along `direction`, Richardson-extrapolated once.
pub fn derivative<F>(f: F, x: Complex64, h: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let central = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let coarse = central(h);
    let fine = central(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Central second derivative, Richardson-extrapolated once.
pub fn second_derivative<F>(f: F, x: Complex64, h: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let fx = f(x);
    let central = |h: f64| (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    let coarse = central(h);
    let fine = central(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Vector-valued central derivative with one Richardson step; used for the
/// branch-tracked root curves and the Omega functions.
pub fn derivative_vec<F, const N: usize>(f: F, x: Complex64, h: f64) -> [Complex64; N]
where
    F: Fn(Complex64) -> [Complex64; N],
{
    let central = |h: f64| {
        let (p, m) = (f(x + h), f(x - h));
        let mut out = [Complex64::new(0.0, 0.0); N];
        for i in 0..N {
            out[i] = (p[i] - m[i]) / (2.0 * h);
        }
        out
    };
    let coarse = central(h);
    let fine = central(h / 2.0);
    let mut out = [Complex64::new(0.0, 0.0); N];
    for i in 0..N {
        out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    }
    out
}

/// Derivatives `f, f', ..., f^(K-1)` of a holomorphic map at `t` from the
/// Cauchy integral formula, discretised by the trapezoid rule on a circle.
///
/// Accuracy is spectral as long as `radius` stays well inside the distance
/// to the nearest singularity of `f`.
pub fn cauchy_derivatives<F, const K: usize>(
    f: F,
    t: Complex64,
    radius: f64,
    nodes: usize,
) -> [Complex64; K]
where
    F: Fn(Complex64) -> Complex64,
{
    let mut out = [Complex64::new(0.0, 0.0); K];
    for j in 0..nodes {
        let theta = 2.0 * PI * j as f64 / nodes as f64;
        let w = Complex64::from_polar(1.0, theta);
        let value = f(t + radius * w);
        // f^(k)(t) = k!/(r^k N) sum f(t + r w_j) w_j^{-k}
        let mut winv = Complex64::new(1.0, 0.0);
        for slot in out.iter_mut() {
            *slot += value * winv;
            winv /= w;
        }
    }
    let mut factorial = 1.0;
    let mut rk = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            factorial *= k as f64;
            rk *= radius;
        }
        *slot *= factorial / (rk * nodes as f64);
    }
    out
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Integrate `f` over the straight segment from `a` to `b` in the complex
/// plane with an `n`-point Gauss-Legendre rule.
pub fn integrate_segment<F>(mut f: F, a: Complex64, b: Complex64, n: usize) -> Complex64
where
    F: FnMut(Complex64) -> Complex64,
{
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| f(mid + half * x) * w)
        .sum::<Complex64>()
        * half
}

/// Largest modulus of the entries.
pub fn max_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
