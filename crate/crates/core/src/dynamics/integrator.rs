//! Dormand-Prince 5(4) with adaptive steps, run along straight segments of a
//! path in the complex time plane.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// States whose max-norm exceeds this are treated as a blow-up.
pub const BLOW_UP_NORM: f64 = 1e12;

/// Environment variable that caps the number of integrator steps.
pub const MAX_STEPS_ENV: &str = "HALPHEN_MAX_STEPS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub atol: f64,
    pub rtol: f64,
    /// Length of the first attempted step along each segment.
    pub initial_step: f64,
    /// Accepted plus rejected steps allowed over the whole path.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { atol: 1e-12, rtol: 1e-12, initial_step: 1e-3, max_steps: 200_000 }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(atol: f64, rtol: f64) -> Self {
        Self { atol, rtol, ..Self::default() }
    }

    /// Apply `HALPHEN_MAX_STEPS` if it is set to a positive integer.
    pub fn with_env_overrides(mut self) -> Self {
        if let Some(n) = std::env::var(MAX_STEPS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
            if n > 0 {
                self.max_steps = n;
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.atol > 0.0) || !(self.rtol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive"));
        }
        if !(self.initial_step > 0.0) {
            return Err(Error::InvalidConfig("initial step must be positive"));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: Complex64,
    pub state: Vec<Complex64>,
    /// Max-norm of the embedded error estimate of the step that produced
    /// this sample (zero for the initial sample).
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub accepted: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("a trajectory always holds its initial sample")
    }

    pub fn end_state(&self) -> &[Complex64] {
        &self.last().state
    }

    pub fn max_error(&self) -> f64 {
        self.samples.iter().map(|s| s.error).fold(0.0, f64::max)
    }
}

// Dormand-Prince tableau. The systems are autonomous, so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrate the autonomous system `dy/dt = rhs(y)` from `path[0]` through
/// every waypoint in turn. A single waypoint yields the initial state.
pub fn integrate<F>(
    mut rhs: F,
    y0: &[Complex64],
    path: &[Complex64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory>
where
    F: FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
{
    cfg.validate()?;
    let start = *path.first().ok_or(Error::InvalidPath)?;
    if path.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidPath);
    }
    let dim = y0.len();
    let mut traj = Trajectory {
        samples: vec![Sample { t: start, state: y0.to_vec(), error: 0.0 }],
        accepted: 0,
        rejected: 0,
    };
    let mut y = y0.to_vec();
    let mut h = cfg.initial_step;

    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let length = (b - a).norm();
        let dir = (b - a) / length;
        let mut sigma = 0.0;
        let mut k1 = rhs(&y)?;
        if k1.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: k1.len() });
        }
        while sigma < length {
            if traj.accepted + traj.rejected >= cfg.max_steps {
                return Err(Error::MaxStepsExceeded {
                    max_steps: cfg.max_steps,
                    at: a + dir * sigma,
                    last: y,
                });
            }
            let last_step = sigma + h >= length * (1.0 - 1e-14);
            let step = if last_step { length - sigma } else { h };
            let dt = dir * step;

            let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
            k.push(k1.clone());
            let mut stage = vec![Complex64::new(0.0, 0.0); dim];
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, kj) in k.iter().enumerate() {
                        acc += A[s][j] * kj[i];
                    }
                    stage[i] = y[i] + dt * acc;
                }
                k.push(rhs(&stage)?);
            }
            // The last stage is evaluated at the 5th-order solution (FSAL).
            let y5 = stage;
            let mut err_norm = 0.0f64;
            let mut err_max = 0.0f64;
            for i in 0..dim {
                let mut e = Complex64::new(0.0, 0.0);
                for s in 0..7 {
                    e += (B5[s] - B4[s]) * k[s][i];
                }
                let e = (dt * e).norm();
                let scale = cfg.atol + cfg.rtol * y[i].norm().max(y5[i].norm());
                err_norm = err_norm.max(e / scale);
                err_max = err_max.max(e);
            }

            if !err_norm.is_finite() || !y5.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                if step < 1e-14 * length.max(1.0) {
                    return Err(Error::BlowUp { norm: f64::INFINITY, at: a + dir * sigma, last: y });
                }
                traj.rejected += 1;
                h = step * 0.2;
                continue;
            }

            if err_norm <= 1.0 {
                let norm = max_norm(&y5);
                if norm > BLOW_UP_NORM {
                    return Err(Error::BlowUp { norm, at: a + dir * sigma, last: y });
                }
                sigma = if last_step { length } else { sigma + step };
                y = y5;
                k1 = k.pop().expect("seven stages");
                traj.accepted += 1;
                traj.samples.push(Sample {
                    t: if last_step { b } else { a + dir * sigma },
                    state: y.clone(),
                    error: err_max,
                });
            } else {
                traj.rejected += 1;
            }
            let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
            let proposed = step * factor;
            // Do not let a short final step shrink the step used on the next segment.
            h = if last_step && err_norm <= 1.0 { h.max(proposed) } else { proposed };
            if h < 1e-15 * length.max(1.0) {
                return Err(Error::BlowUp { norm: max_norm(&y), at: a + dir * sigma, last: y });
            }
        }
    }
    Ok(traj)
}
