//! Continuous algebraic Riccati equation by Newton–Kleinman iteration.
//!
//! Solves `A^T P + P A - P B R^-1 B^T P + Q = 0` for a single input. Each
//! Newton step is one Lyapunov solve, so only dense linear solves are
//! needed. The iteration must start from a stabilizing gain: `K0 = 0` when
//! `A` is already stable, otherwise the pole-shifting gain
//! `K0 = B^T Z^-1` with `(A + b I) Z + Z (A + b I)^T = 2 B B^T` and
//! `b > max Re eig(A)`, which places every closed-loop pole left of `-b`
//! for a controllable pair.

use crate::error::{Error, Result};
use crate::linalg::{
    add, identity, inverse, is_hurwitz, lyapunov, matmul, norm_inf, outer, row_times, scale, sub,
    symmetrize, transpose, Mat,
};
use crate::scalar::Real;

const MAX_ITERATIONS: usize = 60;

/// State-feedback gain `u = -K x` and the Riccati solution it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrGain<T, const N: usize> {
    pub k: [T; N],
    pub p: Mat<T, N, N>,
    /// Newton steps taken.
    pub iterations: usize,
    /// Final `‖A^T P + P A - P B R^-1 B^T P + Q‖_inf`.
    pub residual: T,
}

/// Riccati residual `A^T P + P A - P B R^-1 B^T P + Q`.
pub fn care_residual<T: Real, const N: usize>(
    a: &Mat<T, N, N>,
    b: &[T; N],
    q: &Mat<T, N, N>,
    r: T,
    p: &Mat<T, N, N>,
) -> Mat<T, N, N> {
    let pb = row_times(b, p); // B^T P, equal to (P B)^T since P is symmetric
    let pbbp = scale(&outer(&pb, &pb), T::one() / r);
    let atp = matmul(&transpose(a), p);
    let pa = matmul(p, a);
    add(&sub(&add(&atp, &pa), &pbbp), q)
}

fn closed_loop<T: Real, const N: usize>(a: &Mat<T, N, N>, b: &[T; N], k: &[T; N]) -> Mat<T, N, N> {
    sub(a, &outer(b, k))
}

fn failed(reason: impl Into<String>, residuals: &[f64]) -> Error {
    Error::SolverFailed {
        reason: reason.into(),
        residuals: residuals.to_vec(),
    }
}

/// Stabilizing initial gain for the Newton iteration.
fn stabilizing_seed<T: Real, const N: usize>(a: &Mat<T, N, N>, b: &[T; N]) -> Result<[T; N]> {
    if is_hurwitz(a) {
        return Ok([T::zero(); N]);
    }
    let shift = norm_inf(a) + T::one();
    let shifted = add(a, &scale(&identity::<T, N>(), shift));
    // lyapunov solves m^T Z + Z m + q = 0; m = -(A + bI)^T gives
    // (A + bI) Z + Z (A + bI)^T = q
    let m = scale(&transpose(&shifted), -T::one());
    let q = scale(&outer(b, b), T::lit(2.0));
    let z = lyapunov(&m, &q)
        .ok_or_else(|| failed("pole-shifting Lyapunov equation is singular", &[]))?;
    let z_inv = inverse(&z).ok_or_else(|| {
        failed(
            "(A, B) is not controllable: controllability Gramian of the shifted system is singular",
            &[],
        )
    })?;
    let k = row_times(b, &z_inv);
    if !is_hurwitz(&closed_loop(a, b, &k)) {
        return Err(failed("pole-shifting seed is not stabilizing", &[]));
    }
    Ok(k)
}

/// Solves the CARE and returns `K = R^-1 B^T P`.
pub fn solve_care<T: Real, const N: usize>(
    a: &Mat<T, N, N>,
    b: &[T; N],
    q: &Mat<T, N, N>,
    r: T,
) -> Result<LqrGain<T, N>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::invalid("r", "must be positive and finite"));
    }
    let finite = a.iter().flatten().chain(q.iter().flatten()).chain(b.iter()).all(|v| v.is_finite());
    if !finite {
        return Err(Error::invalid("care", "A, B and Q must be finite"));
    }
    if norm_inf(&sub(q, &transpose(q))) > T::epsilon() * (T::one() + norm_inf(q)) {
        return Err(Error::invalid("q", "must be symmetric"));
    }
    for (i, row) in q.iter().enumerate() {
        if row[i] < T::zero() {
            return Err(Error::invalid("q", "must be positive semidefinite"));
        }
    }

    let tol = T::lit(T::SOLVER_TOL);
    let mut k = stabilizing_seed(a, b)?;
    let mut history: Vec<f64> = Vec::new();
    let mut best: Option<(T, Mat<T, N, N>)> = None;
    let mut stalled = 0;
    for _ in 0..MAX_ITERATIONS {
        let ak = closed_loop(a, b, &k);
        let rhs = add(q, &scale(&outer(&k, &k), r));
        let p = lyapunov(&ak, &rhs)
            .ok_or_else(|| failed("closed-loop Lyapunov equation is singular", &history))?;
        let p = symmetrize(&p);
        let residual = norm_inf(&care_residual(a, b, q, r, &p));
        history.push(residual.as_f64());
        if !residual.is_finite() {
            return Err(failed("iteration diverged", &history));
        }
        k = scale(&[row_times(b, &p)], T::one() / r)[0];
        let improved = best.as_ref().is_none_or(|(r0, _)| residual < *r0);
        if improved {
            // a drop of less than half is round-off, not Newton convergence
            if best.as_ref().is_some_and(|(r0, _)| residual > *r0 * T::lit(0.5)) {
                stalled += 1;
            } else {
                stalled = 0;
            }
            best = Some((residual, p));
        } else {
            stalled += 1;
        }
        if residual <= tol || stalled >= 3 {
            break;
        }
    }
    let (residual, p) = best.ok_or_else(|| failed("no iterations ran", &history))?;
    // stagnation is acceptable only if it happened at round-off level
    let accept = tol.max(T::epsilon() * T::lit(1e3) * (T::one() + norm_inf(&p)) * (T::one() + norm_inf(a)));
    if residual > accept {
        return Err(failed(
            format!("did not converge (best residual {:e})", residual.as_f64()),
            &history,
        ));
    }
    let k = scale(&[row_times(b, &p)], T::one() / r)[0];
    if !is_hurwitz(&closed_loop(a, b, &k)) {
        return Err(failed("final gain does not stabilize the plant", &history));
    }
    Ok(LqrGain {
        k,
        p,
        iterations: history.len(),
        residual,
    })
}
