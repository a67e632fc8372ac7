//! Velocity estimation from successive encoder angles.

use crate::scalar::Real;
use crate::state::angle_delta;

/// State of a single-pole low-pass filter `y += a (u - y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState<T> {
    pub output: T,
}

impl<T: Real> FilterState<T> {
    pub fn new(output: T) -> Self {
        Self { output }
    }
}

impl<T: Real> Default for FilterState<T> {
    fn default() -> Self {
        Self::new(T::zero())
    }
}

/// Discrete smoothing factor of a first-order low-pass with the given
/// cutoff, `a = dt / (dt + 1 / (2 pi fc))`. A non-positive cutoff disables
/// filtering (`a = 1`).
pub fn filter_coefficient<T: Real>(dt: T, cutoff_hz: T) -> T {
    if !(cutoff_hz > T::zero()) {
        return T::one();
    }
    let tau = T::one() / (T::lit(2.0) * T::PI() * cutoff_hz);
    dt / (dt + tau)
}

/// Wrapped finite difference of two angles divided by `dt`, smoothed by the
/// filter. `coefficient` comes from [`filter_coefficient`].
pub fn estimate_velocity<T: Real>(
    current: T,
    previous: T,
    dt: T,
    coefficient: T,
    filter: FilterState<T>,
) -> (T, FilterState<T>) {
    let raw = angle_delta(current, previous) / dt;
    let output = filter.output + coefficient * (raw - filter.output);
    (output, FilterState::new(output))
}
