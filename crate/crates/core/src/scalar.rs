//! Scalar abstraction shared by the physics, reward and control code.
//!
//! Everything numeric in the crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. The harness and CLI work in `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable by the simulator and controllers.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Central finite-difference step used for Jacobians.
    const FD_STEP: f64;
    /// Riccati residual tolerance the CARE solver iterates down to.
    const SOLVER_TOL: f64;

    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        // f64 -> f32/f64 never fails, it only rounds
        Self::from_f64(x).unwrap()
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    const FD_STEP: f64 = 1e-3;
    const SOLVER_TOL: f64 = 1e-3;
}

impl Real for f64 {
    const FD_STEP: f64 = 1e-6;
    const SOLVER_TOL: f64 = 1e-10;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.25), 0.25f32);
        assert_eq!(f32::lit(0.1).as_f64(), 0.1f32 as f64);
    }
}
