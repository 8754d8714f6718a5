//! Roots of the cubic `N^3 + (3/2) g N^2 + (3/2) g' N + g''/4` attached to
//! Chazy data, and their continuation along a path in `tau`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frobenius::GammaSeries;

/// Discriminants below this (relative to `scale^6`) are treated as zero.
pub const DISCRIMINANT_FLOOR: f64 = 1e-12;
/// Two pairings whose costs differ by less than this are ambiguous.
pub const PAIRING_GAP: f64 = 1e-12;

/// A monic cubic `x^3 + a x^2 + b x + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonicCubic {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl MonicCubic {
    /// The cubic whose roots are the Halphen functions for Chazy data `(g, g', g'')`.
    pub fn from_chazy(g: Complex64, g1: Complex64, g2: Complex64) -> Self {
        Self { a: 1.5 * g, b: 1.5 * g1, c: 0.25 * g2 }
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        ((x + self.a) * x + self.b) * x + self.c
    }

    fn derivative(&self, x: Complex64) -> Complex64 {
        (3.0 * x + 2.0 * self.a) * x + self.b
    }

    /// Root magnitude scale `max(|a|, |b|^(1/2), |c|^(1/3))`.
    pub fn scale(&self) -> f64 {
        self.a.norm().max(self.b.norm().sqrt()).max(self.c.norm().cbrt())
    }

    pub fn discriminant(&self) -> Complex64 {
        let (a, b, c) = (self.a, self.b, self.c);
        18.0 * a * b * c - 4.0 * a * a * a * c + a * a * b * b - 4.0 * b * b * b - 27.0 * c * c
    }

    /// Largest Vieta residual relative to the size of the coefficients.
    pub fn vieta_residual(&self, r: &[Complex64; 3]) -> f64 {
        let s = self.scale().max(1e-300);
        let e1 = (r[0] + r[1] + r[2] + self.a).norm() / s;
        let e2 = (r[0] * r[1] + r[1] * r[2] + r[2] * r[0] - self.b).norm() / (s * s);
        let e3 = (r[0] * r[1] * r[2] + self.c).norm() / (s * s * s);
        e1.max(e2).max(e3)
    }

    /// Distinct roots ordered by descending real part, ties broken by
    /// descending imaginary part.
    pub fn roots(&self) -> Result<[Complex64; 3]> {
        let scale = self.scale();
        if scale == 0.0 {
            return Err(Error::DegenerateCubic(0.0));
        }
        let rel = self.discriminant().norm() / scale.powi(6);
        if rel < DISCRIMINANT_FLOOR {
            return Err(Error::DegenerateCubic(rel));
        }
        let mut roots = self.cardano();
        for r in roots.iter_mut() {
            for _ in 0..4 {
                let d = self.derivative(*r);
                if d.norm() == 0.0 {
                    break;
                }
                let step = self.eval(*r) / d;
                *r -= step;
                if step.norm() <= 1e-17 * scale {
                    break;
                }
            }
        }
        sort_roots(&mut roots, scale);
        Ok(roots)
    }

    fn cardano(&self) -> [Complex64; 3] {
        let (a, b, c) = (self.a, self.b, self.c);
        // Depressed cubic y^3 + p y + q with x = y - a/3.
        let p = b - a * a / 3.0;
        let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
        let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        // Pick the sign that avoids cancellation.
        let w = if (-q / 2.0 + disc).norm() >= (-q / 2.0 - disc).norm() {
            -q / 2.0 + disc
        } else {
            -q / 2.0 - disc
        };
        let u = w.cbrt();
        let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let mut rot = Complex64::new(1.0, 0.0);
        for slot in out.iter_mut() {
            let uk = u * rot;
            let y = if uk.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { uk - p / (3.0 * uk) };
            *slot = y - a / 3.0;
            rot *= omega;
        }
        out
    }
}

fn sort_roots(roots: &mut [Complex64; 3], scale: f64) {
    let tie = 1e-9 * scale.max(1e-300);
    roots.sort_by(|x, y| {
        if (x.re - y.re).abs() <= tie {
            y.im.total_cmp(&x.im)
        } else {
            y.re.total_cmp(&x.re)
        }
    });
}

/// Roots `N_1, N_2, N_3` for Chazy data `(g, g', g'')`.
pub fn cubic_roots(g: Complex64, g1: Complex64, g2: Complex64) -> Result<[Complex64; 3]> {
    MonicCubic::from_chazy(g, g1, g2).roots()
}

const PERMUTATIONS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Reorder `next` so that slot `i` is the root closest to `prev[i]`, taking
/// the permutation with the least total squared displacement.
pub fn match_roots(prev: &[Complex64; 3], next: &[Complex64; 3], sample: usize) -> Result<[Complex64; 3]> {
    let mut costs: Vec<(f64, [usize; 3])> = PERMUTATIONS
        .iter()
        .map(|p| ((0..3).map(|i| (next[p[i]] - prev[i]).norm_sqr()).sum::<f64>(), *p))
        .collect();
    costs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let scale = prev.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1.0);
    if costs[1].0 - costs[0].0 < PAIRING_GAP * scale {
        return Err(Error::AmbiguousPairing(sample));
    }
    let p = costs[0].1;
    Ok([next[p[0]], next[p[1]], next[p[2]]])
}

/// Branch-continued roots along a path of `tau` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCurve {
    pub taus: Vec<Complex64>,
    pub roots: Vec<[Complex64; 3]>,
}

/// Root branches along `path`, labelled at the first sample by the ordering
/// rule of [`MonicCubic::roots`] and continued by nearest-neighbour pairing.
pub fn root_curve(path: &[Complex64], order: usize) -> Result<RootCurve> {
    root_curve_with_labels(path, order, [0, 1, 2])
}

/// As [`root_curve`], but branch `i` starts at the root in sorted position
/// `labels[i]`.
pub fn root_curve_with_labels(path: &[Complex64], order: usize, labels: [usize; 3]) -> Result<RootCurve> {
    let mut seen = [false; 3];
    for &l in &labels {
        if l > 2 || seen[l] {
            return Err(Error::InvalidConfig("labels must be a permutation of 0, 1, 2"));
        }
        seen[l] = true;
    }
    if path.is_empty() {
        return Err(Error::InvalidPath);
    }
    let gamma = GammaSeries::new(order)?;
    let mut roots: Vec<[Complex64; 3]> = Vec::with_capacity(path.len());
    for (n, &tau) in path.iter().enumerate() {
        let sorted = gamma.halphen_roots(tau)?;
        let next = match roots.last() {
            None => [sorted[labels[0]], sorted[labels[1]], sorted[labels[2]]],
            Some(prev) => match_roots(prev, &sorted, n)?,
        };
        roots.push(next);
    }
    Ok(RootCurve { taus: path.to_vec(), roots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cube_roots_of_unity() {
        let r = cubic_roots(c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.0)).unwrap();
        for z in r {
            assert!((z * z * z - 1.0).norm() < 1e-14);
        }
        assert!((r[0] - 1.0).norm() < 1e-14);
        assert!(r[1].im > 0.0 && r[2].im < 0.0);
    }

    #[test]
    fn vieta_relations() {
        let (g, g1, g2) = (c(0.3, 1.1), c(-0.7, 0.2), c(1.5, -2.0));
        let r = cubic_roots(g, g1, g2).unwrap();
        let sum: Complex64 = r.iter().sum();
        assert!((sum + 1.5 * g).norm() < 1e-12);
        assert!((r[0] * r[1] + r[1] * r[2] + r[2] * r[0] - 1.5 * g1).norm() < 1e-12);
        assert!((r[0] * r[1] * r[2] + 0.25 * g2).norm() < 1e-12);
    }

    #[test]
    fn repeated_roots_are_rejected() {
        // (x - 1)^2 (x + 2) = x^3 - 3x + 2
        let cubic = MonicCubic { a: c(0.0, 0.0), b: c(-3.0, 0.0), c: c(2.0, 0.0) };
        assert!(matches!(cubic.roots(), Err(Error::DegenerateCubic(_))));
        assert!(cubic_roots(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn clustered_roots_are_polished() {
        // Roots 1, 1 + 1e-4, -2: close but distinct.
        let r = [c(1.0, 0.0), c(1.0 + 1e-4, 0.0), c(-2.0, 0.0)];
        let cubic = MonicCubic {
            a: -(r[0] + r[1] + r[2]),
            b: r[0] * r[1] + r[1] * r[2] + r[2] * r[0],
            c: -(r[0] * r[1] * r[2]),
        };
        let got = cubic.roots().unwrap();
        assert!((got[0] - r[1]).norm() < 1e-10);
        assert!((got[1] - r[0]).norm() < 1e-10);
        assert!(cubic.vieta_residual(&got) < 1e-14);
    }

    #[test]
    fn matching_follows_nearest_roots() {
        let prev = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        let next = [c(-1.01, 0.0), c(1.0, 0.01), c(0.0, 0.99)];
        assert_eq!(match_roots(&prev, &next, 1).unwrap(), [next[1], next[2], next[0]]);
        let same = [c(0.0, 0.0); 3];
        assert!(matches!(match_roots(&same, &same, 4), Err(Error::AmbiguousPairing(4))));
    }

    #[test]
    fn constant_path_keeps_labels() {
        let tau = c(0.05, 1.5);
        let curve = root_curve(&[tau, tau, tau], 40).unwrap();
        assert!(curve.roots.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn relabelling_permutes_branches() {
        let path: Vec<Complex64> = (0..6).map(|k| c(0.05 + 0.01 * k as f64, 1.6)).collect();
        let base = root_curve(&path, 40).unwrap();
        let perm = [2, 0, 1];
        let other = root_curve_with_labels(&path, 40, perm).unwrap();
        for (a, b) in base.roots.iter().zip(&other.roots) {
            for i in 0..3 {
                assert_eq!(b[i], a[perm[i]]);
            }
        }
        assert!(root_curve_with_labels(&path, 40, [0, 0, 1]).is_err());
    }
}
