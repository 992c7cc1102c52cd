use beamforge::numerics::{
    herm_eig, numerical_rank, psd_factor, rel_frobenius, solve_pd, CMatrix, HermitianMatrix, C64,
};
use beamforge::oracles::{random_hermitian, random_psd};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_pd_solve_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let a = &random_psd(6, 6, &mut rng) + &HermitianMatrix::identity(6).scale(1e-2);
        let b = CMatrix::from_fn(6, 3, |i, j| {
            C64::new((i + j) as f64 - 2.5, (i * j) as f64 * 0.5)
        });
        let x = solve_pd(&a, &b).unwrap();
        let res = (a.as_matrix() * &x - &b).norm() / b.norm();
        assert!(res < 1e-9, "{res:e}");
    }
}

#[test]
fn solve_small_diagonal() {
    let a = HermitianMatrix::from_real_diagonal(&[2.0, 4.0]);
    let b = CMatrix::from_column_slice(2, 1, &[C64::new(2.0, 0.0), C64::new(4.0, 0.0)]);
    let x = solve_pd(&a, &b).unwrap();
    assert!((x[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
    assert!((x[(1, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn eigenvectors_are_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [1, 2, 7, 16, 32] {
        let h = random_hermitian(n, &mut rng);
        let e = herm_eig(&h).unwrap();
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!(rel_frobenius(&gram, &CMatrix::identity(n, n)) < 1e-10);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn factor_of_diagonal_rank_one() {
    let f = psd_factor(&HermitianMatrix::from_real_diagonal(&[4.0, 0.0])).unwrap();
    assert_eq!(f.ncols(), 1);
    assert!((f[(0, 0)].norm() - 2.0).abs() < 1e-15 && f[(1, 0)].norm() < 1e-15);
}

#[test]
fn non_hermitian_input_rejected() {
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ],
    );
    assert!(HermitianMatrix::new(m).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstruction(seed in any::<u64>(), n in 1usize..=32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, &mut rng);
        let e = herm_eig(&h).unwrap();
        prop_assert!(rel_frobenius(&e.reconstruct(), h.as_matrix()) <= 1e-10);
    }

    #[test]
    fn factor_idempotent(seed in any::<u64>(), n in 1usize..=12, r in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_psd(n, r.min(n), &mut rng);
        let f = psd_factor(&h).unwrap();
        let ffh = HermitianMatrix::hermitian_part(&(&f * f.adjoint()));
        prop_assert!(rel_frobenius(ffh.as_matrix(), h.as_matrix()) <= 1e-8);
        let g = psd_factor(&ffh).unwrap();
        prop_assert!(rel_frobenius(&(&g * g.adjoint()), ffh.as_matrix()) <= 1e-8);
        prop_assert_eq!(f.ncols(), numerical_rank(&herm_eig(&h).unwrap(), 1e-10));
    }

    #[test]
    fn rank_scale_invariant(seed in any::<u64>(), n in 2usize..=10, r in 1usize..=10, p in -6i32..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_psd(n, r.min(n), &mut rng);
        let base = numerical_rank(&herm_eig(&h).unwrap(), 1e-10);
        let scaled = numerical_rank(&herm_eig(&h.scale(10f64.powi(p))).unwrap(), 1e-10);
        prop_assert_eq!(base, scaled);
    }
}
