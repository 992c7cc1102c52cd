//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` and then applies
//! the classical real rotation on the `(p, q)` plane. A pivot is skipped when
//! it is negligible relative to `sqrt(|a_pp a_qq|)`, which keeps small
//! eigenvalues accurate relative to their own size.

use super::{CMatrix, HermitianMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted in descending order with matching unitary eigenvectors
/// (columns of `vectors`).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U diag(λ) U^H`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let l = self.eigenvalues[j];
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= l);
        }
        scaled * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn herm_eig(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    let mut a = h.as_matrix().clone();
    let mut v = CMatrix::identity(n, n);
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }

    let mut converged = n <= 1;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                if rotate(&mut a, &mut v, p, q) {
                    rotated = true;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NonConvergence {
            sweeps,
            residual: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]`; returns false when the pivot was negligible.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) -> bool {
    let apq = a[(p, q)];
    let mag = apq.norm();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if mag == 0.0 || mag <= f64::EPSILON * 0.5 * (app.abs() * aqq.abs()).sqrt() {
        if mag != 0.0 {
            a[(p, q)] = C64::new(0.0, 0.0);
            a[(q, p)] = C64::new(0.0, 0.0);
        }
        return false;
    }
    let phase = apq / mag;
    let zeta = (aqq - app) / (2.0 * mag);
    let t = if zeta == 0.0 {
        1.0
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sc = phase.conj() * s;
    let cc = phase.conj() * c;
    let n = a.nrows();

    // A <- A V, with V = [[c, s], [-s e*, c e*]] on the (p, q) plane
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * sc;
        a[(k, q)] = akp * s + akq * cc;
    }
    // A <- V^H A
    let (pc, pq) = (phase * s, phase * c);
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * pc;
        a[(q, k)] = apk * s + aqk * pq;
    }
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * sc;
        v[(k, q)] = vkp * s + vkq * cc;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_frobenius;
    use proptest::prelude::*;

    fn herm(n: usize, f: impl Fn(usize, usize) -> C64) -> HermitianMatrix {
        HermitianMatrix::new(CMatrix::from_fn(n, n, f)).unwrap()
    }

    fn check_invariants(h: &HermitianMatrix, d: &EigenDecomposition, tol: f64) {
        let n = h.dim();
        let unit = d.vectors.adjoint() * &d.vectors;
        assert!(rel_frobenius(&unit, &CMatrix::identity(n, n)) < tol);
        let scale = h.frobenius_norm().max(1e-300);
        assert!((d.reconstruct() - h.as_matrix()).norm() / scale < tol);
        for w in d.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn identity() {
        let h = HermitianMatrix::identity(3);
        let d = herm_eig(&h).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 1.0, 1.0]);
        check_invariants(&h, &d, 1e-14);
    }

    #[test]
    fn pauli_x() {
        let h = herm(2, |i, j| C64::new(if i != j { 1.0 } else { 0.0 }, 0.0));
        let d = herm_eig(&h).unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((d.eigenvalues[1] + 1.0).abs() < 1e-15);
        check_invariants(&h, &d, 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 2 ± 1
        let h = herm(2, |i, j| match (i, j) {
            (0, 1) => C64::new(0.0, 1.0),
            (1, 0) => C64::new(0.0, -1.0),
            _ => C64::new(2.0, 0.0),
        });
        let d = herm_eig(&h).unwrap();
        assert!((d.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
        check_invariants(&h, &d, 1e-14);
    }

    #[test]
    fn graded_spectrum_keeps_small_eigenvalues() {
        // diag(1, 1e-8, 1e-16) rotated by a fixed unitary
        let n = 3;
        let q = {
            let g = CMatrix::from_fn(n, n, |i, j| {
                C64::new(
                    (i * 3 + j) as f64 * 0.37 + 0.1,
                    (i as f64 - j as f64) * 0.21,
                )
            });
            g.qr().q()
        };
        let lam = [1.0, 1e-8, 1e-16];
        let mut dm = CMatrix::zeros(n, n);
        for i in 0..n {
            dm[(i, i)] = C64::new(lam[i], 0.0);
        }
        let h = HermitianMatrix::hermitian_part(&(&q * dm * q.adjoint()));
        let d = herm_eig(&h).unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1e-8).abs() < 1e-14);
        assert!(d.eigenvalues[2].abs() < 1e-14);
    }

    fn arb_hermitian(max_n: usize) -> impl Strategy<Value = HermitianMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |raw| {
                let m = CMatrix::from_fn(n, n, |i, j| {
                    C64::new(raw[i * n + j], raw[n * n + i * n + j])
                });
                HermitianMatrix::hermitian_part(&m)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reconstructs_random_hermitian(h in arb_hermitian(32)) {
            let d = herm_eig(&h).unwrap();
            check_invariants(&h, &d, 1e-10);
        }

        #[test]
        fn rank_is_scale_invariant(h in arb_hermitian(8), k in 0usize..4, e in -6i32..=6) {
            // make it rank deficient: H' = G G^H with G n×k
            let n = h.dim();
            let k = k.min(n);
            let g = h.as_matrix().columns(0, k).into_owned();
            let base = HermitianMatrix::hermitian_part(&(&g * g.adjoint()));
            let r0 = crate::numerics::numerical_rank(&herm_eig(&base).unwrap(), 1e-10);
            let scaled = base.scale(10f64.powi(e));
            let r1 = crate::numerics::numerical_rank(&herm_eig(&scaled).unwrap(), 1e-10);
            prop_assert_eq!(r0, r1);
        }
    }
}
