//! Deterministic Gaussian streams.
//!
//! The generator is ChaCha8 seeded through `seed_from_u64`, and normals come
//! from `rand_distr::StandardNormal` (ziggurat). Both are portable, so a seed
//! reproduces the same stream on every platform; `src/tests/rng_reference.rs`
//! pins the first draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Endo, Vector};

#[derive(Clone, Debug)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for one trial of one claim: the seed is
    /// `seed ⊕ trial` and the claim selects the ChaCha stream id.
    pub fn for_trial(seed: u64, stream: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ trial);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    pub fn vector(&mut self, n: usize) -> Vector {
        Vector::from_fn(n, |_, _| self.normal())
    }

    pub fn matrix(&mut self, r: usize, c: usize) -> Endo {
        // column-major fill order is part of the reproducibility contract
        Endo::from_fn(r, c, |_, _| self.normal())
    }

    pub fn take(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }
}

/// Convenience constructor mirroring the harness's seeding.
pub fn seeded_rng(seed: u64) -> GaussianStream {
    GaussianStream::new(seed)
}
