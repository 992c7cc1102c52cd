use std::ops::{Add, Sub};

use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Dense complex Hermitian matrix.
///
/// Construction through [`HermitianMatrix::new`] checks hermiticity against
/// `1e-12 * max|entry|`; internally computed matrices go through
/// [`HermitianMatrix::hermitian_part`], which projects onto the Hermitian
/// subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

const HERMITICITY_TOL: f64 = 1e-12;

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Validation(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("matrix has non-finite entries".into()));
        }
        let scale = m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
        let tolerance = HERMITICITY_TOL * scale;
        let n = m.nrows();
        let mut asymmetry = 0.0_f64;
        for i in 0..n {
            asymmetry = asymmetry.max(m[(i, i)].im.abs());
            for j in (i + 1)..n {
                asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        Ok(Self::hermitian_part(&m))
    }

    /// `(m + m^H) / 2`.
    pub fn hermitian_part(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                out[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            }
        }
        HermitianMatrix(out)
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        HermitianMatrix(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(d[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMatrix::identity(n, n))
    }

    /// Rank-one `v v^H`.
    pub fn outer(v: &CVector) -> Self {
        let n = v.len();
        HermitianMatrix(CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        HermitianMatrix(&self.0 * C64::new(alpha, 0.0))
    }

    /// `Re(v^H H v)`; the imaginary part vanishes for Hermitian `H`.
    pub fn quad_form(&self, v: &CVector) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            let mut col = C64::new(0.0, 0.0);
            for i in 0..n {
                col += v[i].conj() * self.0[(i, j)];
            }
            acc += (col * v[j]).re;
        }
        acc
    }

    /// `Re tr(self · other)`, i.e. the real inner product `<self, other>`.
    pub fn trace_product(&self, other: &HermitianMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// `I_q ⊗ self`, built by copying the block onto the diagonal.
    pub fn kron_identity(&self, q: usize) -> Self {
        let m = self.dim();
        let mut out = CMatrix::zeros(m * q, m * q);
        for b in 0..q {
            out.view_mut((b * m, b * m), (m, m)).copy_from(&self.0);
        }
        HermitianMatrix(out)
    }

    /// Embeds `self` in the top-left corner of an `n × n` zero matrix.
    pub fn embed(&self, n: usize) -> Self {
        let m = self.dim();
        assert!(n >= m, "embedding dimension {n} smaller than {m}");
        let mut out = CMatrix::zeros(n, n);
        out.view_mut((0, 0), (m, m)).copy_from(&self.0);
        HermitianMatrix(out)
    }

    /// Principal submatrix on rows/columns `start..start + len`.
    pub fn principal_block(&self, start: usize, len: usize) -> Self {
        HermitianMatrix(self.0.view((start, start), (len, len)).into_owned())
    }

    /// `S^H self S` for an arbitrary `n × k` matrix `S`.
    pub fn congruence(&self, s: &CMatrix) -> Self {
        Self::hermitian_part(&(s.adjoint() * &self.0 * s))
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}
