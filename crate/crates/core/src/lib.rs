//! Numerical kernels for twistor spaces over pseudo-Riemannian manifolds.

pub mod curvature;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod octonion;
pub mod rng;
pub mod sphere;
pub mod twistor;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{DiagonalMetric, Endo, Signature, Vector};
pub use rng::GaussianStream;

#[cfg(test)]
mod tests;
