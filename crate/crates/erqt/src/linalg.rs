//! Dense complex linear algebra for the steady-state solvers.
//!
//! Both Lyapunov routes start from one complex Schur decomposition
//! `A = U T U†`: the spectral route extracts eigenvectors of `T` by
//! triangular back-substitution, the direct route solves the transformed
//! equation `T Y + Y T† = −U† Q U` column by column (Bartels-Stewart).

use crate::{CMatrix, Error, Result, C64};

/// Complex Schur decomposition `A = U T U†` with `T` upper triangular and
/// `U` unitary.
pub(crate) fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    a.clone()
        .try_schur(f64::EPSILON, 100_000)
        .map(|s| s.unpack())
        .ok_or_else(|| Error::Inconsistent("Schur decomposition did not converge".into()))
}

/// Eigenvalues read off the diagonal of the Schur factor.
pub(crate) fn schur_eigenvalues(t: &CMatrix) -> Vec<C64> {
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Right eigenvectors of `A = U T U†`, one column per eigenvalue, each
/// normalized to unit length.
///
/// For (near-)degenerate eigenvalues the back-substitution denominators are
/// floored at `ε‖T‖`, mirroring the LAPACK treatment; the caller is expected
/// to judge the result through the eigenvector condition number.
pub(crate) fn eigenvectors_from_schur(u: &CMatrix, t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let scale = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let floor = f64::EPSILON * scale;
    let mut y = CMatrix::zeros(n, n);
    for p in 0..n {
        let lambda = t[(p, p)];
        y[(p, p)] = C64::new(1.0, 0.0);
        for i in (0..p).rev() {
            let mut rhs = C64::new(0.0, 0.0);
            for j in i + 1..=p {
                rhs += t[(i, j)] * y[(j, p)];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < floor {
                denom = C64::new(floor, 0.0);
            }
            y[(i, p)] = -rhs / denom;
        }
        let norm = y.column(p).norm();
        if norm > 0.0 {
            for i in 0..=p {
                y[(i, p)] /= C64::new(norm, 0.0);
            }
        }
    }
    u * y
}

/// 1-norm condition number `‖V‖₁ ‖V⁻¹‖₁`, or `∞` when `V` is singular.
pub(crate) fn condition_number(v: &CMatrix) -> f64 {
    let norm1 = |m: &CMatrix| {
        (0..m.ncols())
            .map(|j| m.column(j).iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    match v.clone().lu().try_inverse() {
        Some(inv) => norm1(v) * norm1(&inv),
        None => f64::INFINITY,
    }
}

/// Solve `A X + X A† + Q = 0` through the Schur factors of `A`
/// (Bartels-Stewart back-substitution).
pub(crate) fn lyapunov_from_schur(u: &CMatrix, t: &CMatrix, q: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let qt = u.adjoint() * q * u;
    let mut y = CMatrix::zeros(n, n);
    for col in (0..n).rev() {
        for row in (0..n).rev() {
            let mut rhs = -qt[(row, col)];
            for r in row + 1..n {
                rhs -= t[(row, r)] * y[(r, col)];
            }
            for r in col + 1..n {
                rhs -= y[(row, r)] * t[(col, r)].conj();
            }
            y[(row, col)] = rhs / (t[(row, row)] + t[(col, col)].conj());
        }
    }
    u * y * u.adjoint()
}

/// Solve `A X + X A† + Q = 0` through the spectral decomposition
/// `A = V Λ V⁻¹`: the transformed solution is
/// `X̃_{pq} = −(V⁻¹ Q V⁻†)_{pq} / (λ_p + λ̄_q)`.
pub(crate) fn lyapunov_from_eigen(
    v: &CMatrix,
    v_inv: &CMatrix,
    eigenvalues: &[C64],
    q: &CMatrix,
) -> CMatrix {
    let n = eigenvalues.len();
    let mut x = v_inv * q * v_inv.adjoint();
    for p in 0..n {
        for r in 0..n {
            x[(p, r)] = -x[(p, r)] / (eigenvalues[p] + eigenvalues[r].conj());
        }
    }
    v * x * v.adjoint()
}

/// Max-norm of the Lyapunov residual `A X + X A† + Q`.
pub(crate) fn lyapunov_residual(a: &CMatrix, x: &CMatrix, q: &CMatrix) -> f64 {
    let r = a * x + x * a.adjoint() + q;
    r.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
