use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("divisor sum needs n >= 1 and k >= 1 (got k={k}, n={n})")]
    InvalidDivisorSum { k: u32, n: u64 },

    #[error("unsupported Eisenstein weight {0} (expected 2, 4 or 6)")]
    UnsupportedWeight(u32),

    #[error("point {0} is not in the upper half-plane")]
    NotInUpperHalfPlane(Complex64),

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("{what} did not converge within {cap} terms")]
    NonConvergence { what: &'static str, cap: usize },

    #[error("argument {0} lies on the period lattice")]
    LatticePoint(Complex64),

    #[error("Jacobi theta index must be 1..=4, got {0}")]
    InvalidThetaIndex(u8),

    #[error("theta characteristic must have entries in {{0,1}}, got ({0},{1})")]
    InvalidCharacteristic(u8, u8),

    #[error("characteristic [{0};{1}] is odd")]
    OddCharacteristic(u8, u8),

    #[error("theta constant vanishes for characteristic [{0};{1}]")]
    VanishingThetaConstant(u8, u8),

    #[error("lambda must be non-zero on the lifted phase space")]
    ZeroLambda,

    #[error("cubic discriminant vanishes (relative size {0:e})")]
    DegenerateCubic(f64),

    #[error("ambiguous root pairing at sample {0}")]
    AmbiguousPairing(usize),

    #[error("canonical coordinates coalesce: {0}")]
    CoalescingCoordinates(&'static str),

    #[error("singular Jacobian")]
    SingularJacobian,

    #[error("Omega parameter s = {0} is in {{0, 1}}")]
    DegenerateOmegaParameter(Complex64),

    #[error("map derivative vanishes at {0}")]
    VanishingDerivative(Complex64),

    #[error("matrix is not in SL(2,Z): det = {0}")]
    NotUnimodular(i64),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("path needs at least one waypoint and distinct consecutive waypoints")]
    InvalidPath,

    #[error("state dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integration exhausted {max_steps} steps at parameter {at}")]
    MaxStepsExceeded { max_steps: usize, at: Complex64, last: Vec<Complex64> },

    #[error("state blew up (norm {norm:e}) after parameter {at}")]
    BlowUp { norm: f64, at: Complex64, last: Vec<Complex64> },

    #[error("unknown verification suite '{0}'")]
    UnknownSuite(String),

    #[error("malformed series data: {0}")]
    MalformedSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;
