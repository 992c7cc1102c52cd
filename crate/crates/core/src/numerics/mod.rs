//! Dense complex Hermitian kernels: eigendecomposition, numerical rank,
//! PSD factorization and positive-definite solves.

mod hermitian;
mod jacobi;

pub use hermitian::HermitianMatrix;
pub use jacobi::{herm_eig, EigenDecomposition};

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default relative threshold for detecting the numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Tolerated negative eigenvalue, relative to the largest one, for inputs
/// that are PSD only up to solver accuracy.
pub const PSD_NEG_TOL: f64 = 1e-8;

/// Counts eigenvalues above `rel_tol * max|λ|`.
pub fn numerical_rank(decomp: &EigenDecomposition, rel_tol: f64) -> usize {
    rank_of(&decomp.eigenvalues, rel_tol)
}

pub(crate) fn rank_of(eigenvalues: &[f64], rel_tol: f64) -> usize {
    let scale = eigenvalues
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    eigenvalues.iter().filter(|&&v| v > rel_tol * scale).count()
}

/// Returns `F` (n×k, k = numerical rank) with `F F^H` equal to `h` after
/// clipping its negative eigenvalues.
pub fn psd_factor(h: &HermitianMatrix) -> Result<CMatrix> {
    let n = h.dim();
    let eig = herm_eig(h)?;
    let lmax = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let lmin = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if lmin < -PSD_NEG_TOL * lmax.max(0.0) || (lmax <= 0.0 && lmin < 0.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: lmin,
            max_eigenvalue: lmax,
        });
    }
    let k = numerical_rank(&eig, DEFAULT_RANK_TOL);
    let mut f = CMatrix::zeros(n, k);
    for j in 0..k {
        let s = eig.eigenvalues[j].sqrt();
        for i in 0..n {
            f[(i, j)] = eig.vectors[(i, j)] * s;
        }
    }
    Ok(f)
}

/// Solves `A X = B` for Hermitian positive definite `A`.
pub fn solve_pd(a: &HermitianMatrix, b: &CMatrix) -> Result<CMatrix> {
    if b.nrows() != a.dim() {
        return Err(Error::Validation(format!(
            "solve_pd: right-hand side has {} rows, matrix is {}x{}",
            b.nrows(),
            a.dim(),
            a.dim()
        )));
    }
    let eig = herm_eig(a)?;
    let lmax = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let lmin = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if !(lmin > 1e-12 * lmax.abs()) || lmax <= 0.0 {
        return Err(Error::Singular {
            min_eigenvalue: lmin,
            max_eigenvalue: lmax,
        });
    }
    let chol = nalgebra::Cholesky::new(a.as_matrix().clone()).ok_or(Error::Singular {
        min_eigenvalue: lmin,
        max_eigenvalue: lmax,
    })?;
    let mut x = chol.solve(b);
    // one step of iterative refinement
    let r = b - a.as_matrix() * &x;
    x += chol.solve(&r);
    Ok(x)
}

/// Relative Frobenius distance `‖a − b‖ / max(‖b‖, tiny)`.
pub fn rel_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn herm(rows: &[&[C64]]) -> HermitianMatrix {
        let n = rows.len();
        HermitianMatrix::new(CMatrix::from_fn(n, n, |i, j| rows[i][j])).unwrap()
    }

    #[test]
    fn rank_with_clear_gap() {
        let d = EigenDecomposition {
            eigenvalues: vec![2.0, 1.0, 1e-16],
            vectors: CMatrix::identity(3, 3),
        };
        assert_eq!(numerical_rank(&d, 1e-10), 2);
    }

    #[test]
    fn rank_of_zero_matrix() {
        let d = herm_eig(&HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(numerical_rank(&d, 1e-10), 0);
    }

    #[test]
    fn factor_identity_and_rank_one() {
        let f = psd_factor(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(f.ncols(), 2);
        assert!(rel_frobenius(&(&f * f.adjoint()), &CMatrix::identity(2, 2)) < 1e-12);

        let h = herm(&[&[c(4.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0)]]);
        let f = psd_factor(&h).unwrap();
        assert_eq!(f.ncols(), 1);
        assert!((f[(0, 0)].norm() - 2.0).abs() < 1e-14);
        assert!(f[(1, 0)].norm() < 1e-14);
    }

    #[test]
    fn factor_rejects_indefinite() {
        let h = herm(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-0.5, 0.0)]]);
        assert!(matches!(psd_factor(&h), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn factor_tolerates_tiny_negative_eigenvalue() {
        let h = herm(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-1e-10, 0.0)]]);
        let f = psd_factor(&h).unwrap();
        assert_eq!(f.ncols(), 1);
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let b = CMatrix::from_fn(3, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let x = solve_pd(&HermitianMatrix::identity(3), &b).unwrap();
        assert!(rel_frobenius(&x, &b) < 1e-15);

        let a = herm(&[&[c(2.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(4.0, 0.0)]]);
        let rhs = CMatrix::from_column_slice(2, 1, &[c(2.0, 0.0), c(4.0, 0.0)]);
        let x = solve_pd(&a, &rhs).unwrap();
        assert!((x[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn solve_singular_reports_min_eigenvalue() {
        let a = herm(&[&[c(1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]]);
        let err = solve_pd(&a, &CMatrix::identity(2, 2)).unwrap_err();
        match err {
            Error::Singular { min_eigenvalue, .. } => assert!(min_eigenvalue.abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }
}
