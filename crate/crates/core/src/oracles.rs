//! Executable equality checks between the closed form and the convex
//! programs, plus sampling baselines and random instance generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::array_model::{AngularRegion, ArrayConfig};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector, HermitianMatrix, C64};
use crate::rayleigh::solve_min_ratio;
use crate::sdp::{solve_sdp, SdpProblem, SdpSolution, SdpStatus, SdpTolerances};

/// Largest dimension accepted by [`lemma2_check`].
pub const LEMMA2_MAX_DIM: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_diff: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleResult {
    pub fn compare(lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let rel_diff = rel_diff(lhs, rhs);
        OracleResult {
            lhs,
            rhs,
            rel_diff,
            tolerance,
            passed: rel_diff <= tolerance,
        }
    }
}

/// `|l - r| / max(|l|, |r|)`, or 0 when both are below `1e-9`.
pub fn rel_diff(l: f64, r: f64) -> f64 {
    let scale = l.abs().max(r.abs());
    if scale < 1e-9 {
        return 0.0;
    }
    (l - r).abs() / scale
}

fn optimal(sol: SdpSolution, what: &str) -> Result<SdpSolution> {
    if sol.status == SdpStatus::Optimal {
        return Ok(sol);
    }
    Err(Error::Sdp {
        status: sol.status.to_string(),
        gap: sol.duality_gap_rel,
        infeasibility: sol.max_infeasibility,
        detail: what.to_string(),
    })
}

/// Closed-form `min r^H B r / r^H A r` against `min tr(BX)` s.t. `tr(AX) = 1`.
pub fn lemma2_check(b: &HermitianMatrix, a: &HermitianMatrix, tol: f64) -> Result<OracleResult> {
    if a.dim() > LEMMA2_MAX_DIM {
        return Err(Error::Validation(format!(
            "lemma2_check is limited to dimension {LEMMA2_MAX_DIM}, got {}",
            a.dim()
        )));
    }
    let closed = solve_min_ratio(b, a)?;
    let mut p = SdpProblem::new(b.clone());
    p.push_eq(a.clone(), 1.0);
    let sdp = optimal(
        solve_sdp(&p, &SdpTolerances::default())?,
        "trace-normalized ratio program",
    )?;
    Ok(OracleResult::compare(
        closed.value,
        sdp.objective_value,
        tol,
    ))
}

/// `f(Q) = min tr((I_Q ⊗ B) X)` s.t. `tr((I_Q ⊗ A_i) X) ≤ b_i`, `X ⪰ 0`.
pub fn lifted_program(
    constraints: &[(HermitianMatrix, f64)],
    b: &HermitianMatrix,
    q: usize,
) -> SdpProblem {
    let mut p = SdpProblem::new(b.kron_identity(q));
    for (a, bi) in constraints {
        p.push_ineq(a.kron_identity(q), *bi);
    }
    p
}

/// Compares `f(Q)` with `f(Q + 1)`.
pub fn lemma3_check(
    constraints: &[(HermitianMatrix, f64)],
    b: &HermitianMatrix,
    q: usize,
    tol: f64,
) -> Result<OracleResult> {
    let m = b.dim();
    if m > 4 || q == 0 || q > 3 || constraints.is_empty() || constraints.len() > 3 {
        return Err(Error::Validation(format!(
            "lemma3_check expects M ≤ 4, 1 ≤ Q ≤ 3 and 1 ≤ K ≤ 3 (got M = {m}, Q = {q}, K = {})",
            constraints.len()
        )));
    }
    if constraints.iter().any(|(a, _)| a.dim() != m) {
        return Err(Error::Validation(
            "constraint dimension differs from B".into(),
        ));
    }
    let tols = SdpTolerances::default();
    let fq = optimal(
        solve_sdp(&lifted_program(constraints, b, q), &tols)?,
        "f(Q)",
    )?;
    let fq1 = optimal(
        solve_sdp(&lifted_program(constraints, b, q + 1), &tols)?,
        "f(Q+1)",
    )?;
    Ok(OracleResult::compare(
        fq.objective_value,
        fq1.objective_value,
        tol,
    ))
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    let v = CVector::from_fn(n, |_, _| complex_normal(rng));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Smallest ratio over `n_samples` random unit vectors with `v^H A v > 1e-12`.
pub fn random_ratio_upper_bound(
    b: &HermitianMatrix,
    a: &HermitianMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Validation("ratio matrices differ in size".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..n_samples {
        let v = random_unit_vector(a.dim(), &mut rng);
        let den = a.quad_form(&v);
        if den > 1e-12 {
            best = best.min(b.quad_form(&v) / den);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Validation(
            "no sample had a positive denominator".into(),
        ))
    }
}

/// Hermitian with i.i.d. complex Gaussian entries.
pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    HermitianMatrix::hermitian_part(&((&g + g.adjoint()) * C64::new(0.5, 0.0)))
}

/// `G G^H` with `G` of size `n × rank`.
pub fn random_psd(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = CMatrix::from_fn(n, rank, |_, _| complex_normal(rng));
    HermitianMatrix::hermitian_part(&(&g * g.adjoint()))
}

/// Random mainlobe of 1 to 3 disjoint intervals; the sidelobe is its
/// complement.
pub fn random_partition(
    rng: &mut ChaCha8Rng,
    m_max: usize,
    q_max: usize,
) -> (ArrayConfig, AngularRegion) {
    let m = rng.random_range(1..=m_max);
    let q = rng.random_range(1..=q_max);
    let k = rng.random_range(1..=3);
    let mut cuts: Vec<f64> = (0..2 * k).map(|_| rng.random_range(-90.0..90.0)).collect();
    cuts.sort_by(f64::total_cmp);
    let ivs: Vec<(f64, f64)> = cuts
        .chunks(2)
        .map(|p| (p[0], p[1]))
        .filter(|(a, b)| b - a > 1e-6)
        .collect();
    let ml = AngularRegion::from_degrees(&ivs)
        .ok()
        .filter(|r| !r.is_empty())
        .unwrap_or_else(|| AngularRegion::from_degrees(&[(-10.0, 10.0)]).expect("static interval"));
    (ArrayConfig { m, q, e: 1.0 }, ml)
}

/// Bounded instance for [`lemma3_check`]: the first constraint matrix is
/// positive definite, the others are indefinite, all bounds are positive and
/// the objective is indefinite.
pub fn random_lemma3_instance(
    rng: &mut ChaCha8Rng,
) -> (Vec<(HermitianMatrix, f64)>, HermitianMatrix, usize) {
    let m = rng.random_range(2..=4);
    let k = rng.random_range(1..=3);
    let q = rng.random_range(1..=3);
    let mut constraints = Vec::with_capacity(k);
    let bounding = &random_psd(m, m, rng) + &HermitianMatrix::identity(m).scale(0.1);
    constraints.push((bounding, rng.random_range(0.5..2.0)));
    for _ in 1..k {
        constraints.push((random_hermitian(m, rng), rng.random_range(0.5..2.0)));
    }
    (constraints, random_hermitian(m, rng), q)
}
