//! Small fixed-size dense matrix helpers.
//!
//! Only what the Riccati solver needs: products, transposes, a pivoted
//! Gaussian elimination, Cholesky and a Kronecker-form Lyapunov solver.
//! Matrices are row-major `[[T; C]; R]`.

use crate::scalar::Real;

pub type Mat<T, const R: usize, const C: usize> = [[T; C]; R];

pub fn zeros<T: Real, const R: usize, const C: usize>() -> Mat<T, R, C> {
    [[T::zero(); C]; R]
}

pub fn identity<T: Real, const N: usize>() -> Mat<T, N, N> {
    let mut m = zeros::<T, N, N>();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn diag<T: Real, const N: usize>(d: [T; N]) -> Mat<T, N, N> {
    let mut m = zeros::<T, N, N>();
    for i in 0..N {
        m[i][i] = d[i];
    }
    m
}

pub fn transpose<T: Real, const R: usize, const C: usize>(a: &Mat<T, R, C>) -> Mat<T, C, R> {
    let mut t = zeros::<T, C, R>();
    for i in 0..R {
        for j in 0..C {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn matmul<T: Real, const R: usize, const K: usize, const C: usize>(
    a: &Mat<T, R, K>,
    b: &Mat<T, K, C>,
) -> Mat<T, R, C> {
    let mut out = zeros::<T, R, C>();
    for i in 0..R {
        for k in 0..K {
            let aik = a[i][k];
            for j in 0..C {
                out[i][j] = out[i][j] + aik * b[k][j];
            }
        }
    }
    out
}

pub fn add<T: Real, const R: usize, const C: usize>(
    a: &Mat<T, R, C>,
    b: &Mat<T, R, C>,
) -> Mat<T, R, C> {
    let mut out = *a;
    for i in 0..R {
        for j in 0..C {
            out[i][j] = out[i][j] + b[i][j];
        }
    }
    out
}

pub fn sub<T: Real, const R: usize, const C: usize>(
    a: &Mat<T, R, C>,
    b: &Mat<T, R, C>,
) -> Mat<T, R, C> {
    let mut out = *a;
    for i in 0..R {
        for j in 0..C {
            out[i][j] = out[i][j] - b[i][j];
        }
    }
    out
}

pub fn scale<T: Real, const R: usize, const C: usize>(a: &Mat<T, R, C>, s: T) -> Mat<T, R, C> {
    let mut out = *a;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v = *v * s;
        }
    }
    out
}

/// `b k` for a column `b` and a row `k`.
pub fn outer<T: Real, const N: usize>(b: &[T; N], k: &[T; N]) -> Mat<T, N, N> {
    let mut out = zeros::<T, N, N>();
    for i in 0..N {
        for j in 0..N {
            out[i][j] = b[i] * k[j];
        }
    }
    out
}

/// `b^T m` for a column `b`.
pub fn row_times<T: Real, const N: usize>(b: &[T; N], m: &Mat<T, N, N>) -> [T; N] {
    let mut out = [T::zero(); N];
    for j in 0..N {
        let mut acc = T::zero();
        for i in 0..N {
            acc = acc + b[i] * m[i][j];
        }
        out[j] = acc;
    }
    out
}

/// Maximum absolute row sum.
pub fn norm_inf<T: Real, const R: usize, const C: usize>(a: &Mat<T, R, C>) -> T {
    a.iter()
        .map(|row| row.iter().fold(T::zero(), |s, v| s + v.abs()))
        .fold(T::zero(), T::max)
}

pub fn symmetrize<T: Real, const N: usize>(a: &Mat<T, N, N>) -> Mat<T, N, N> {
    let half = T::lit(0.5);
    let mut out = *a;
    for i in 0..N {
        for j in 0..N {
            out[i][j] = half * (a[i][j] + a[j][i]);
        }
    }
    out
}

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is `n x n` row-major. Returns `None` if a pivot underflows `tiny`.
pub fn solve_dense<T: Real>(a: &mut [T], b: &mut [T], n: usize) -> Option<Vec<T>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tiny = scale * T::epsilon() * T::lit(n as f64);
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot_abs > tiny) {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        let piv = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / piv;
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                a[r * n + j] = a[r * n + j] - f * a[col * n + j];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc = acc - a[i * n + j] * x[j];
        }
        x[i] = acc / a[i * n + i];
    }
    Some(x)
}

pub fn inverse<T: Real, const N: usize>(a: &Mat<T, N, N>) -> Option<Mat<T, N, N>> {
    let mut out = zeros::<T, N, N>();
    for col in 0..N {
        let mut flat: Vec<T> = a.iter().flat_map(|r| r.iter().copied()).collect();
        let mut rhs = vec![T::zero(); N];
        rhs[col] = T::one();
        let x = solve_dense(&mut flat, &mut rhs, N)?;
        for row in 0..N {
            out[row][col] = x[row];
        }
    }
    Some(out)
}

/// True if the symmetric matrix `a` is positive definite (Cholesky succeeds).
#[allow(clippy::needless_range_loop)]
pub fn is_positive_definite<T: Real, const N: usize>(a: &Mat<T, N, N>) -> bool {
    let mut l = zeros::<T, N, N>();
    for i in 0..N {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

/// Solves the continuous Lyapunov equation `m^T x + x m + q = 0` through its
/// Kronecker form. Returns `None` if the operator is singular, which happens
/// exactly when two eigenvalues of `m` sum to zero.
pub fn lyapunov<T: Real, const N: usize>(m: &Mat<T, N, N>, q: &Mat<T, N, N>) -> Option<Mat<T, N, N>> {
    let n2 = N * N;
    let mut op = vec![T::zero(); n2 * n2];
    let mut rhs = vec![T::zero(); n2];
    // unknown x[i][j] lives at index i * N + j
    for i in 0..N {
        for j in 0..N {
            let row = i * N + j;
            rhs[row] = -q[i][j];
            // (m^T x)[i][j] = sum_k m[k][i] x[k][j]
            for k in 0..N {
                op[row * n2 + k * N + j] = op[row * n2 + k * N + j] + m[k][i];
            }
            // (x m)[i][j] = sum_k x[i][k] m[k][j]
            for k in 0..N {
                op[row * n2 + i * N + k] = op[row * n2 + i * N + k] + m[k][j];
            }
        }
    }
    let x = solve_dense(&mut op, &mut rhs, n2)?;
    let mut out = zeros::<T, N, N>();
    for i in 0..N {
        for j in 0..N {
            out[i][j] = x[i * N + j];
        }
    }
    Some(symmetrize(&out))
}

/// Hurwitz test without an eigensolver: `m` is stable iff the Lyapunov
/// solution for `q = I` exists and is positive definite.
pub fn is_hurwitz<T: Real, const N: usize>(m: &Mat<T, N, N>) -> bool {
    match lyapunov(m, &identity::<T, N>()) {
        Some(x) => x.iter().flatten().all(|v| v.is_finite()) && is_positive_definite(&x),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let mut a: Vec<f64> = vec![2.0, 1.0, 1.0, 3.0];
        let mut b = vec![3.0, 5.0];
        let x = solve_dense(&mut a, &mut b, 2).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14);
        assert!((x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn singular_system_is_reported() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(solve_dense(&mut a, &mut b, 2).is_none());
    }

    #[test]
    fn inverse_of_diag() {
        let m = diag([2.0, 4.0, 8.0]);
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, diag([0.5, 0.25, 0.125]));
    }

    #[test]
    fn lyapunov_scalar_and_residual() {
        // -2x + 1 = 0 for m = -1
        let x = lyapunov::<f64, 1>(&[[-1.0]], &[[1.0]]).unwrap();
        assert!((x[0][0] - 0.5).abs() < 1e-15);

        let m = [[0.0, 1.0], [-2.0, -3.0]];
        let q = [[1.0, 0.0], [0.0, 1.0]];
        let x = lyapunov(&m, &q).unwrap();
        let res = add(&add(&matmul(&transpose(&m), &x), &matmul(&x, &m)), &q);
        assert!(norm_inf(&res) < 1e-12);
    }

    #[test]
    fn hurwitz_test() {
        assert!(is_hurwitz(&[[0.0, 1.0], [-2.0, -3.0]]));
        assert!(!is_hurwitz(&[[0.0, 1.0], [2.0, -3.0]]));
        assert!(!is_hurwitz(&[[0.0, 1.0], [-1.0, 0.0]]));
        assert!(!is_hurwitz(&[[1.0]]));
    }

    #[test]
    fn cholesky_detects_indefinite() {
        assert!(is_positive_definite(&[[2.0, 1.0], [1.0, 2.0]]));
        assert!(!is_positive_definite(&[[1.0, 2.0], [2.0, 1.0]]));
    }
}
