//! Minimum of the generalized Rayleigh quotient `r^H B r / r^H A r` where
//! `A` may be singular.
//!
//! With `A = U diag(Λ1, 0) U^H` and `U^H B U` partitioned conformally into
//! `[[B0, B2], [B2^H, B1]]`, the minimizer is `r = U [y1; y2]` where
//! `y1 = Λ1^{-1/2} x`, `y2 = -B1^{-1} B2^H y1`, and `x` is the bottom
//! eigenvector of `Λ1^{-1/2} (B0 - B2 B1^{-1} B2^H) Λ1^{-1/2}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    herm_eig, rank_of, solve_pd, CMatrix, CVector, HermitianMatrix, C64, DEFAULT_RANK_TOL,
    PSD_NEG_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    FullRank,
    Singular,
}

#[derive(Debug, Clone)]
pub struct RatioSolution {
    /// Unit-norm minimizer; its largest-magnitude entry is real positive.
    pub r: CVector,
    /// `r^H B r / r^H A r` evaluated at `r`.
    pub value: f64,
    /// Numerical rank of `A`.
    pub rank_used: usize,
    pub branch: Branch,
    /// Smallest eigenvalue of the reduced matrix.
    pub reduced_eigenvalue: f64,
}

pub fn solve_min_ratio(b: &HermitianMatrix, a: &HermitianMatrix) -> Result<RatioSolution> {
    solve_min_ratio_with(b, a, DEFAULT_RANK_TOL)
}

pub fn solve_min_ratio_with(
    b: &HermitianMatrix,
    a: &HermitianMatrix,
    rank_tol: f64,
) -> Result<RatioSolution> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::Validation(format!(
            "ratio matrices differ in size: B is {}x{}, A is {n}x{n}",
            b.dim(),
            b.dim()
        )));
    }
    if !(rank_tol > 0.0) {
        return Err(Error::Validation("rank tolerance must be positive".into()));
    }

    let gamma = herm_eig(&(a + b))?;
    let gmax = gamma.max_eigenvalue();
    if !(gamma.min_eigenvalue() > 1e-12 * gmax.abs()) {
        return Err(Error::NotPositiveDefiniteSum {
            min_eigenvalue: gamma.min_eigenvalue(),
        });
    }

    let eig = herm_eig(a)?;
    let lmax = eig.max_eigenvalue();
    if eig.min_eigenvalue() < -PSD_NEG_TOL * lmax.max(0.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min_eigenvalue(),
            max_eigenvalue: lmax,
        });
    }
    let rank = rank_of(&eig.eigenvalues, rank_tol);
    if rank == 0 || lmax <= 0.0 {
        return Err(Error::ZeroMainlobe);
    }

    let inv_sqrt: Vec<f64> = eig.eigenvalues[..rank]
        .iter()
        .map(|l| 1.0 / l.sqrt())
        .collect();
    let u1 = eig.vectors.columns(0, rank).into_owned();

    let (r, reduced_eigenvalue, branch) = if rank == n {
        // A^{-1/2} = U1 Λ^{-1/2} U1^H
        let w = scale_columns(&u1, &inv_sqrt) * u1.adjoint();
        let red = b.congruence(&w);
        let (x, mu) = bottom_eigenpair(&red)?;
        (&w * x, mu, Branch::FullRank)
    } else {
        let u2 = eig.vectors.columns(rank, n - rank).into_owned();
        let bm = b.as_matrix();
        let b0 = u1.adjoint() * bm * &u1;
        let b2 = u1.adjoint() * bm * &u2;
        let b1 = HermitianMatrix::hermitian_part(&(u2.adjoint() * bm * &u2));

        let b1_eig = herm_eig(&b1)?;
        if !(b1_eig.min_eigenvalue() > 1e-12 * gmax) {
            return Err(Error::NullBlockNotPd {
                min_eigenvalue: b1_eig.min_eigenvalue(),
            });
        }
        // K = B1^{-1} B2^H
        let k = solve_pd(&b1, &b2.adjoint())?;
        let schur = HermitianMatrix::hermitian_part(&(b0 - &b2 * &k));
        let l = CMatrix::from_diagonal(&CVector::from_iterator(
            rank,
            inv_sqrt.iter().map(|&s| C64::new(s, 0.0)),
        ));
        let red = schur.congruence(&l);
        let (x, mu) = bottom_eigenpair(&red)?;
        let y1 = &l * x;
        let y2 = -(&k * &y1);
        (&u1 * y1 + &u2 * y2, mu, Branch::Singular)
    };

    let mut r = r;
    let norm = r.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Validation("minimizer collapsed to zero".into()));
    }
    r /= C64::new(norm, 0.0);
    fix_phase(&mut r);

    let value = b.quad_form(&r) / a.quad_form(&r);
    Ok(RatioSolution {
        r,
        value,
        rank_used: rank,
        branch,
        reduced_eigenvalue,
    })
}

fn scale_columns(m: &CMatrix, s: &[f64]) -> CMatrix {
    let mut out = m.clone();
    for (j, &sj) in s.iter().enumerate() {
        out.column_mut(j).scale_mut(sj);
    }
    out
}

fn bottom_eigenpair(h: &HermitianMatrix) -> Result<(CVector, f64)> {
    let eig = herm_eig(h)?;
    let last = eig.dim() - 1;
    Ok((eig.vectors.column(last).into_owned(), eig.eigenvalues[last]))
}

/// Rotates `v` so its first near-largest entry is real positive.
pub(crate) fn fix_phase(v: &mut CVector) {
    let peak = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if peak == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() >= (1.0 - 1e-9) * peak).copied() {
        let rot = z.conj() / z.norm();
        for e in v.iter_mut() {
            *e *= rot;
        }
    }
}
