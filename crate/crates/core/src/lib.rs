//! Exact q-series, genus-one special functions, Darboux-Halphen dynamics and
//! the Chazy Frobenius manifold, with numerical verification of the
//! identities that tie them together.

pub mod connections;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod frobenius;
pub mod json;
pub mod numeric;
pub mod qseries;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
