//! Trivial reference policies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Controller;
use crate::scalar::Real;
use crate::state::PendulumState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroController<T> {
    limit: T,
}

impl<T: Real> ZeroController<T> {
    pub fn new(limit: T) -> Self {
        Self { limit }
    }
}

impl<T: Real> Controller<T> for ZeroController<T> {
    fn name(&self) -> &'static str {
        "zero"
    }

    fn control(&mut self, _state: &PendulumState<T>) -> T {
        T::zero()
    }

    fn limit(&self) -> T {
        self.limit
    }
}

/// Uniform voltage on `[-limit, limit]` from a seeded stream.
#[derive(Debug, Clone)]
pub struct RandomController<T> {
    rng: ChaCha8Rng,
    limit: T,
}

impl<T: Real> RandomController<T> {
    pub fn new(limit: T, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            limit,
        }
    }
}

impl<T: Real> Controller<T> for RandomController<T> {
    fn name(&self) -> &'static str {
        "random"
    }

    fn control(&mut self, _state: &PendulumState<T>) -> T {
        let u: f64 = self.rng.random_range(-1.0..=1.0);
        T::lit(u) * self.limit
    }

    fn limit(&self) -> T {
        self.limit
    }
}
