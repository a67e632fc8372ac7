//! Furuta pendulum equations of motion driven by an ideal DC motor.
//!
//! Generalized coordinates are `q = [theta, alpha]` with `alpha = 0`
//! upright. With `l = Lp / 2` the kinetic energy is
//!
//! ```text
//! T = 1/2 (Jr + mp Lr^2 + mp l^2 sin^2 a) th'^2 - mp Lr l cos a th' a' + 1/2 (Jp + mp l^2) a'^2
//! ```
//!
//! and the potential is `mp g l (cos a + 1)`, zero when hanging down. The
//! Euler-Lagrange equations give `M(q) q'' = f(q, q', tau)` with
//!
//! ```text
//! f_theta = tau - Dr th' - 2 mp l^2 sin a cos a a' th' - mp Lr l sin a a'^2
//! f_alpha = mp l^2 sin a cos a th'^2 + mp g l sin a - Dp a'
//! ```

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;
use crate::state::{wrap_finite, PendulumState, PhysicalParams};

/// Time derivative of a [`PendulumState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative<T> {
    pub theta_dot: T,
    pub alpha_dot: T,
    pub theta_ddot: T,
    pub alpha_ddot: T,
}

impl<T: Real> Derivative<T> {
    pub fn to_array(&self) -> [T; 4] {
        [self.theta_dot, self.alpha_dot, self.theta_ddot, self.alpha_ddot]
    }
}

/// Linearization `x' = A x + B u` about the upright equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModel<T> {
    pub a_matrix: Mat<T, 4, 4>,
    pub b_matrix: [T; 4],
}

/// Shaft torque of an ideal DC motor with back-EMF: `kt (V - km th') / Rm`.
#[inline]
pub fn motor_torque<T: Real>(voltage: T, theta_dot: T, params: &PhysicalParams<T>) -> T {
    params.torque_constant * (voltage - params.back_emf_constant * theta_dot)
        / params.motor_resistance
}

/// `(sin a, cos a)` evaluated after reflecting about the nearest of `0`
/// and `pi`, so both equilibria give exact zeros.
#[inline]
pub(crate) fn pendulum_trig<T: Real>(alpha: T) -> (T, T) {
    let pi = T::PI();
    let half_pi = T::FRAC_PI_2();
    if alpha > half_pi {
        let (s, c) = (pi - alpha).sin_cos();
        (s, -c)
    } else if alpha < -half_pi {
        let (s, c) = (alpha + pi).sin_cos();
        (-s, -c)
    } else {
        alpha.sin_cos()
    }
}

/// Mass matrix `M(alpha)`.
pub fn mass_matrix<T: Real>(alpha: T, p: &PhysicalParams<T>) -> Mat<T, 2, 2> {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let (s, c) = pendulum_trig(alpha);
    let off = -half * p.pendulum_mass * p.pendulum_length * p.arm_length * c;
    [
        [
            p.arm_inertia
                + p.pendulum_mass * p.arm_length * p.arm_length
                + quarter * p.pendulum_mass * p.pendulum_length * p.pendulum_length * s * s,
            off,
        ],
        [
            off,
            p.pendulum_inertia_cm + quarter * p.pendulum_mass * p.pendulum_length * p.pendulum_length,
        ],
    ]
}

/// Right-hand side of the ODE on a raw (unwrapped) state vector.
pub(crate) fn state_derivative<T: Real>(
    x: &[T; 4],
    voltage: T,
    p: &PhysicalParams<T>,
) -> Result<[T; 4]> {
    let [_, alpha, theta_dot, alpha_dot] = *x;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let l = half * p.pendulum_length;
    let mp = p.pendulum_mass;
    let (s, c) = pendulum_trig(alpha);

    let m = mass_matrix(alpha, p);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !(det > T::zero()) {
        return Err(Error::SingularMassMatrix { det: det.as_f64() });
    }

    let tau = motor_torque(voltage, theta_dot, p);
    let coupling = mp * p.arm_length * l;
    let f_theta = tau
        - p.arm_damping * theta_dot
        - two * mp * l * l * s * c * alpha_dot * theta_dot
        - coupling * s * alpha_dot * alpha_dot;
    let f_alpha = mp * l * l * s * c * theta_dot * theta_dot + mp * p.gravity * l * s
        - p.pendulum_damping * alpha_dot;

    let theta_ddot = (m[1][1] * f_theta - m[0][1] * f_alpha) / det;
    let alpha_ddot = (m[0][0] * f_alpha - m[1][0] * f_theta) / det;
    Ok([theta_dot, alpha_dot, theta_ddot, alpha_ddot])
}

/// Accelerations of both joints for a constant motor voltage.
pub fn accelerations<T: Real>(
    state: &PendulumState<T>,
    voltage: T,
    params: &PhysicalParams<T>,
) -> Result<Derivative<T>> {
    let d = state_derivative(&state.to_array(), voltage, params)?;
    Ok(Derivative {
        theta_dot: d[0],
        alpha_dot: d[1],
        theta_ddot: d[2],
        alpha_ddot: d[3],
    })
}

/// Advances the plant by `dt` with classical RK4 over `substeps` equal
/// substeps, holding `voltage` constant. Angles are wrapped on return.
pub fn integrate_step<T: Real>(
    state: &PendulumState<T>,
    voltage: T,
    dt: T,
    substeps: usize,
    params: &PhysicalParams<T>,
) -> Result<PendulumState<T>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::invalid("dt", "must be positive and finite"));
    }
    if substeps == 0 {
        return Err(Error::invalid("substeps", "must be at least 1"));
    }
    let h = dt / T::lit(substeps as f64);
    let half_h = h * T::lit(0.5);
    let sixth_h = h / T::lit(6.0);
    let two = T::lit(2.0);

    let mut x = state.to_array();
    for substep in 0..substeps {
        let k1 = state_derivative(&x, voltage, params)?;
        let k2 = state_derivative(&axpy(&x, half_h, &k1), voltage, params)?;
        let k3 = state_derivative(&axpy(&x, half_h, &k2), voltage, params)?;
        let k4 = state_derivative(&axpy(&x, h, &k3), voltage, params)?;
        for i in 0..4 {
            x[i] = x[i] + sixth_h * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration { substep });
        }
    }
    Ok(PendulumState {
        theta: wrap_finite(x[0]),
        alpha: wrap_finite(x[1]),
        theta_dot: x[2],
        alpha_dot: x[3],
    })
}

#[inline]
fn axpy<T: Real>(x: &[T; 4], a: T, k: &[T; 4]) -> [T; 4] {
    [x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2], x[3] + a * k[3]]
}

/// Kinetic plus potential energy, zero at the hanging rest state.
pub fn total_energy<T: Real>(state: &PendulumState<T>, p: &PhysicalParams<T>) -> T {
    let half = T::lit(0.5);
    let m = mass_matrix(state.alpha, p);
    let (w0, w1) = (state.theta_dot, state.alpha_dot);
    let kinetic = half * (m[0][0] * w0 * w0 + (m[0][1] + m[1][0]) * w0 * w1 + m[1][1] * w1 * w1);
    let potential = half * p.pendulum_mass * p.gravity * p.pendulum_length * (pendulum_trig(state.alpha).1 + T::one());
    kinetic + potential
}

/// Energy stored in the pendulum alone (arm held still), zero when hanging.
pub fn pendulum_energy<T: Real>(state: &PendulumState<T>, p: &PhysicalParams<T>) -> T {
    let half = T::lit(0.5);
    let m = mass_matrix(state.alpha, p);
    half * m[1][1] * state.alpha_dot * state.alpha_dot
        + half * p.pendulum_mass * p.gravity * p.pendulum_length * (pendulum_trig(state.alpha).1 + T::one())
}

/// Energy of the upright rest state, `mp g Lp`.
pub fn upright_energy<T: Real>(p: &PhysicalParams<T>) -> T {
    p.pendulum_mass * p.gravity * p.pendulum_length
}

/// Central-difference Jacobians of the state derivative at `(x, voltage)`.
pub fn jacobian<T: Real>(
    x: &[T; 4],
    voltage: T,
    p: &PhysicalParams<T>,
    step: T,
) -> Result<(Mat<T, 4, 4>, [T; 4])> {
    let two_h = step + step;
    let mut a = [[T::zero(); 4]; 4];
    for j in 0..4 {
        let mut plus = *x;
        let mut minus = *x;
        plus[j] = plus[j] + step;
        minus[j] = minus[j] - step;
        let fp = state_derivative(&plus, voltage, p)?;
        let fm = state_derivative(&minus, voltage, p)?;
        for i in 0..4 {
            a[i][j] = (fp[i] - fm[i]) / two_h;
        }
    }
    let fp = state_derivative(x, voltage + step, p)?;
    let fm = state_derivative(x, voltage - step, p)?;
    let mut b = [T::zero(); 4];
    for i in 0..4 {
        b[i] = (fp[i] - fm[i]) / two_h;
    }
    Ok((a, b))
}

/// Jacobians at the upright equilibrium by central finite differences.
pub fn linearize_upright<T: Real>(p: &PhysicalParams<T>) -> Result<LinearModel<T>> {
    let (a_matrix, b_matrix) = jacobian(&[T::zero(); 4], T::zero(), p, T::lit(T::FD_STEP))?;
    Ok(LinearModel { a_matrix, b_matrix })
}

/// Closed-form small-angle model about upright, derived by hand from the
/// equations above with `sin a ~ a`, `cos a ~ 1` and quadratic velocity
/// terms dropped.
pub fn small_angle_model<T: Real>(p: &PhysicalParams<T>) -> LinearModel<T> {
    let half = T::lit(0.5);
    let l = half * p.pendulum_length;
    let mp = p.pendulum_mass;
    let j_arm = p.arm_inertia + mp * p.arm_length * p.arm_length;
    let j_pend = p.pendulum_inertia_cm + mp * l * l;
    let coupling = mp * p.arm_length * l;
    let det = j_arm * j_pend - coupling * coupling;
    let gain = p.torque_constant / p.motor_resistance;
    // f_theta ~ gain V - (gain km + Dr) th',  f_alpha ~ mp g l a - Dp a'
    let arm_drag = gain * p.back_emf_constant + p.arm_damping;
    let grav = mp * p.gravity * l;

    let z = T::zero();
    let o = T::one();
    LinearModel {
        a_matrix: [
            [z, z, o, z],
            [z, z, z, o],
            [
                z,
                coupling * grav / det,
                -j_pend * arm_drag / det,
                -coupling * p.pendulum_damping / det,
            ],
            [
                z,
                j_arm * grav / det,
                -coupling * arm_drag / det,
                -j_arm * p.pendulum_damping / det,
            ],
        ],
        b_matrix: [z, z, j_pend * gain / det, coupling * gain / det],
    }
}
