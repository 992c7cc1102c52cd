use beamforge::array_model::*;
use beamforge::numerics::{herm_eig, HermitianMatrix};
use beamforge::oracles::{
    lifted_program, random_hermitian, random_lemma3_instance, random_psd, rel_diff,
};
use beamforge::rayleigh::solve_min_ratio;
use beamforge::sdp::*;
use beamforge::sdr_recovery::ratio_violation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> SdpTolerances {
    SdpTolerances::default()
}

fn ratio_program(b: &HermitianMatrix, a: &HermitianMatrix) -> SdpProblem {
    let mut p = SdpProblem::new(b.clone());
    p.push_eq(a.clone(), 1.0);
    p
}

fn regions(m: usize, q: usize, width: f64) -> (ArrayConfig, AngularRegion, RegionMatrices) {
    let cfg = ArrayConfig::new(m, q, 1.0).unwrap();
    let ml = AngularRegion::from_lobes_deg(&[(0.0, width)]).unwrap();
    let rm = build_region_matrices(cfg, &ml, &ml.complement(), 4).unwrap();
    (cfg, ml, rm)
}

fn assert_certified(s: &SdpSolution) {
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!(s.duality_gap_rel <= 1e-6 && s.max_infeasibility <= 1e-7);
    assert!(s.objective_value >= s.dual_objective - 1e-6 * (1.0 + s.objective_value.abs()));
    let e = herm_eig(&s.x).unwrap();
    assert!(e.min_eigenvalue() >= -1e-8 * e.max_eigenvalue().max(0.0));
}

#[test]
fn trivial_ratio_program() {
    let s = solve_sdp(
        &ratio_program(
            &HermitianMatrix::from_real_diagonal(&[3.0, 1.0]),
            &HermitianMatrix::identity(2),
        ),
        &tol(),
    )
    .unwrap();
    assert_certified(&s);
    assert!((s.objective_value - 1.0).abs() < 1e-8);
}

#[test]
fn ratio_program_matches_closed_form_m6() {
    let (_, _, rm) = regions(6, 1, 22.0);
    let s = solve_sdp(&ratio_program(&rm.a_sl, &rm.a_ml), &tol()).unwrap();
    assert_certified(&s);
    let cf = solve_min_ratio(&rm.a_sl, &rm.a_ml).unwrap().value;
    assert!(rel_diff(cf, s.objective_value) <= 1e-5);
}

#[test]
fn realification_preserves_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let mut p = SdpProblem::new(random_hermitian(4, &mut rng));
        p.push_eq(HermitianMatrix::identity(4), 1.0);
        p.push_ineq(random_hermitian(4, &mut rng), 0.3);
        let complex = solve_sdp(&p, &tol()).unwrap();
        let real = solve_sdp(&realify(&p), &tol()).unwrap();
        assert_certified(&complex);
        assert_certified(&real);
        assert!(
            (real.objective_value - 2.0 * complex.objective_value).abs()
                <= 1e-9 * (1.0 + real.objective_value.abs())
        );
    }
}

#[test]
fn covariance_program_m4_40deg() {
    let (cfg, ml, rm) = regions(4, 4, 40.0);
    let lobes = lobe_constraints(&ml, 0.5).unwrap();
    let p = build_q_equals_m(&cfg, &rm, &lobes).unwrap();
    let s = solve_sdp(&p, &tol()).unwrap();
    assert_certified(&s);
    assert!((rm.a_ml_base.trace_product(&s.x) - 1.0).abs() < 1e-7);

    let c = recover_c_from_r(&s.x, 1.0).unwrap();
    assert!(ratio_violation(&c, &cfg, &lobes).unwrap() <= 1e-6);
    let trace_ratio = rm.a_sl_base.trace_product(&s.x) / rm.a_ml_base.trace_product(&s.x);
    assert!((isl_ratio(&c, &rm).unwrap() - trace_ratio).abs() <= 1e-7);

    let bp = beampattern(&c, &cfg, &BeampatternSamples::uniform_grid(0.05).unwrap()).unwrap();
    let w = measure_3db_width(&bp, &ml).unwrap();
    assert!((w - 40.0).abs() <= 2.0 * 0.5, "{w}");
}

#[test]
fn builder_rejects_mismatched_q() {
    let (cfg, ml, rm) = regions(4, 2, 30.0);
    let lobes = lobe_constraints(&ml, 0.5).unwrap();
    assert!(build_q_equals_m(&cfg, &rm, &lobes).is_err());
}

#[test]
fn relaxation_contains_covariance_program() {
    let (cfg, ml, rm) = regions(4, 4, 30.0);
    let lobes = lobe_constraints(&ml, 0.5).unwrap();
    let cov = solve_sdp(&build_q_equals_m(&cfg, &rm, &lobes).unwrap(), &tol()).unwrap();
    let sdr = solve_sdp(&build_sdr(&cfg, &rm, &lobes).unwrap(), &tol()).unwrap();
    assert_certified(&cov);
    assert_certified(&sdr);
    assert!(rel_diff(cov.objective_value, sdr.objective_value) <= 1e-5);
    let (x, _) = split_sdr_solution(&sdr.x);
    assert!((rm.a_ml.trace_product(&x) - 1.0).abs() < 1e-7);
    let n = sdr.x.dim();
    assert!((sdr.x.as_matrix()[(n - 1, n - 1)].re - 1.0).abs() < 1e-7);
}

#[test]
fn relaxation_value_independent_of_q() {
    let vals: Vec<f64> = [1, 2]
        .iter()
        .map(|&q| {
            let (cfg, ml, rm) = regions(6, q, 30.0);
            let lobes = lobe_constraints(&ml, 0.5).unwrap();
            let s = solve_sdp(&build_sdr(&cfg, &rm, &lobes).unwrap(), &tol()).unwrap();
            assert_certified(&s);
            s.objective_value
        })
        .collect();
    assert!(rel_diff(vals[0], vals[1]) <= 1e-5, "{vals:?}");
}

#[test]
fn reference_angle_constraints_are_trivial() {
    let (cfg, ml, rm) = regions(4, 4, 30.0);
    let lobes = lobe_constraints(&ml, 0.5).unwrap();
    let p = build_q_equals_m(&cfg, &rm, &lobes).unwrap();
    // the center grid point yields a zero row and -½ A(θ0)
    let mid = lobes[0].grid.len() / 2;
    assert_eq!(lobes[0].grid[mid], lobes[0].theta0);
    assert_eq!(p.ineq_constraints[2 * mid].0.max_abs(), 0.0);
    let a0 = HermitianMatrix::outer(&steering(0.0, 4).unwrap());
    assert!(
        (p.ineq_constraints[2 * mid + 1].0.as_matrix() + a0.scale(0.5).as_matrix()).norm() < 1e-15
    );
}

#[test]
fn solver_is_deterministic() {
    let (cfg, ml, rm) = regions(4, 2, 30.0);
    let p = build_sdr(&cfg, &rm, &lobe_constraints(&ml, 1.0).unwrap()).unwrap();
    let a = solve_sdp(&p, &tol()).unwrap();
    let b = solve_sdp(&p, &tol()).unwrap();
    assert_eq!(a.x, b.x);
    assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
}

#[test]
fn lemma_three_at_solver_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let (cons, b, q) = random_lemma3_instance(&mut rng);
        let fq = solve_sdp(&lifted_program(&cons, &b, q), &tol()).unwrap();
        let fq1 = solve_sdp(&lifted_program(&cons, &b, q + 1), &tol()).unwrap();
        assert_certified(&fq);
        assert_certified(&fq1);
        assert!(
            (fq.objective_value - fq1.objective_value).abs()
                <= 2e-6 * (1.0 + fq.objective_value.abs())
        );
    }
}

#[test]
fn dump_round_trip_solves_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_psd(3, 1, &mut rng);
    let b = random_psd(3, 3, &mut rng);
    let p = ratio_program(&b, &a);
    let q = parse_dump(&write_dump(&p)).unwrap();
    assert_eq!(p, q);
    let (x, y) = (
        solve_sdp(&p, &tol()).unwrap(),
        solve_sdp(&q, &tol()).unwrap(),
    );
    assert_eq!(x.objective_value.to_bits(), y.objective_value.to_bits());
}
