//! Recovery of a feasible coefficient vector from a relaxed solution, and the
//! beamwidth-constrained design pipeline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::array_model::{
    build_region_matrices, isl_ratio, steering, AngularRegion, ArrayConfig, RegionMatrices,
};
use crate::design::{
    assemble, scale_to_power, CoefficientSolution, DesignOptions, LobeSpec, SdpInfo,
};
use crate::error::{Error, Result};
use crate::numerics::{
    herm_eig, numerical_rank, psd_factor, CVector, HermitianMatrix, C64, DEFAULT_RANK_TOL,
};
use crate::sdp::{
    build_q_equals_m, build_sdr, lobe_constraints, recover_c_from_r, solve_sdp, split_sdr_solution,
    LobeConstraint, SdpSolution,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizationReport {
    pub n_samples: usize,
    pub n_feasible: usize,
    pub best_objective: f64,
    pub sdr_lower_bound: f64,
    /// `(best - bound) / bound`.
    pub gap_rel: f64,
    pub seed: u64,
    /// Position of the winner in the candidate list.
    pub best_index: usize,
}

/// `c* + F z_k` with `F F^H = X* - c* c*^H` and `z_k ~ CN(0, I)`, preceded by
/// `c*` and the dominant scaled eigenvector of `X*`.
pub fn sample_candidates(
    c_star: &CVector,
    x_star: &HermitianMatrix,
    n: usize,
    seed: u64,
) -> Result<Vec<CVector>> {
    let dim = c_star.len();
    if x_star.dim() != dim {
        return Err(Error::Validation(format!(
            "relaxed solution is {}x{} but c* has length {dim}",
            x_star.dim(),
            x_star.dim()
        )));
    }
    let cov = x_star - &HermitianMatrix::outer(c_star);
    let f = psd_factor(&cov)?;
    let eig = herm_eig(x_star)?;
    let dominant = eig.vectors.column(0) * C64::new(eig.max_eigenvalue().max(0.0).sqrt(), 0.0);

    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("finite deviation");
    let mut out = Vec::with_capacity(n + 2);
    out.push(c_star.clone());
    out.push(dominant);
    for k in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let z = CVector::from_fn(f.ncols(), |_, _| {
            C64::new(normal.sample(&mut rng), normal.sample(&mut rng))
        });
        out.push(c_star + &f * z);
    }
    Ok(out)
}

fn power(c: &CVector, m: usize, q: usize, theta: f64) -> Result<f64> {
    let a = steering(theta, m)?;
    Ok((0..q).map(|j| a.dotc(&c.rows(j * m, m)).norm_sqr()).sum())
}

/// Worst violation of `½ ≤ P(θ)/P(θ0) ≤ 1` over every lobe grid; infinite
/// when some `P(θ0)` vanishes.
pub fn ratio_violation(c: &CVector, config: &ArrayConfig, lobes: &[LobeConstraint]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for lobe in lobes {
        let p0 = power(c, config.m, config.q, lobe.theta0)?;
        if !(p0 > 0.0) {
            return Ok(f64::INFINITY);
        }
        for &t in &lobe.grid {
            let r = power(c, config.m, config.q, t)? / p0;
            worst = worst.max(0.5 - r).max(r - 1.0);
        }
    }
    Ok(worst)
}

/// Lowest-ISL candidate meeting the ratio constraints within `eps_feas`;
/// ties go to the lowest index.
pub fn select_best_feasible(
    candidates: &[CVector],
    rm: &RegionMatrices,
    lobes: &[LobeConstraint],
    eps_feas: f64,
    sdr_lower_bound: f64,
    seed: u64,
) -> Result<(CVector, RandomizationReport)> {
    if !(eps_feas >= 0.0) {
        return Err(Error::Validation(
            "feasibility tolerance must be non-negative".into(),
        ));
    }
    let mut best: Option<(usize, f64)> = None;
    let mut n_feasible = 0;
    for (k, c) in candidates.iter().enumerate() {
        if ratio_violation(c, &rm.config, lobes)? > eps_feas {
            continue;
        }
        let Ok(isl) = isl_ratio(c, rm) else { continue };
        n_feasible += 1;
        if best.is_none_or(|(_, b)| isl < b) {
            best = Some((k, isl));
        }
    }
    let (idx, obj) = best.ok_or(Error::RandomizationFailed {
        n_candidates: candidates.len(),
    })?;
    let report = RandomizationReport {
        n_samples: candidates.len(),
        n_feasible,
        best_objective: obj,
        sdr_lower_bound,
        gap_rel: (obj - sdr_lower_bound) / sdr_lower_bound.abs().max(1e-300),
        seed,
        best_index: idx,
    };
    Ok((candidates[idx].clone(), report))
}

/// `C` with `C C^H = Σ_q X_qq` when that sum has rank at most `Q`.
fn block_sum_candidate(x: &HermitianMatrix, config: &ArrayConfig) -> Result<Option<CVector>> {
    let (m, q) = (config.m, config.q);
    let mut r = HermitianMatrix::zeros(m);
    for j in 0..q {
        r = &r + &x.principal_block(j * m, m);
    }
    let eig = herm_eig(&r)?;
    if numerical_rank(&eig, 1e-6) > q || eig.max_eigenvalue() <= 0.0 {
        return Ok(None);
    }
    let mut c = CVector::zeros(m * q);
    for j in 0..q.min(m) {
        let s = C64::new(eig.eigenvalues[j].max(0.0).sqrt(), 0.0);
        c.rows_mut(j * m, m).copy_from(&(eig.vectors.column(j) * s));
    }
    Ok(Some(c))
}

fn sdp_info(sol: &SdpSolution, audit: f64) -> SdpInfo {
    SdpInfo {
        status: sol.status.to_string(),
        objective: sol.objective_value,
        duality_gap_rel: sol.duality_gap_rel,
        max_infeasibility: sol.max_infeasibility,
        iterations: sol.iterations,
        solution_rank: herm_eig(&sol.x).map_or(0, |e| numerical_rank(&e, DEFAULT_RANK_TOL)),
        audit_violation: audit,
    }
}

fn surface(sol: SdpSolution, lobes: &[LobeConstraint]) -> Result<SdpSolution> {
    if sol.status == crate::sdp::SdpStatus::Optimal {
        return Ok(sol);
    }
    let n: usize = lobes.iter().map(|l| l.grid.len()).sum();
    let spans: Vec<String> = lobes
        .iter()
        .map(|l| {
            format!(
                "[{:.2}°, {:.2}°]",
                l.interval.0.to_degrees(),
                l.interval.1.to_degrees()
            )
        })
        .collect();
    Err(Error::Sdp {
        status: sol.status.to_string(),
        gap: sol.duality_gap_rel,
        infeasibility: sol.max_infeasibility,
        detail: format!(
            "{} ratio constraints on {n} angles over lobes {}",
            2 * n,
            spans.join(", ")
        ),
    })
}

/// Minimum-ISL design subject to `½ ≤ P(θ)/P(θ0) ≤ 1` across each mainlobe.
pub fn design_with_beamwidth(
    config: ArrayConfig,
    mainlobe: &AngularRegion,
    sidelobe: &AngularRegion,
    opts: &DesignOptions,
) -> Result<CoefficientSolution> {
    let rm = build_region_matrices(config, mainlobe, sidelobe, opts.nodes_per_degree)?;
    let lobes = lobe_constraints(mainlobe, opts.constraint_grid_step_deg)?;
    let audit_lobes = lobe_constraints(mainlobe, opts.constraint_grid_step_deg / 4.0)?;

    let (c, sol, report) = if config.q == config.m {
        let p = build_q_equals_m(&config, &rm, &lobes)?;
        let sol = surface(solve_sdp(&p, &opts.sdp)?, &lobes)?;
        (recover_c_from_r(&sol.x, config.e)?, sol, None)
    } else {
        let p = build_sdr(&config, &rm, &lobes)?;
        let sol = surface(solve_sdp(&p, &opts.sdp)?, &lobes)?;
        let (x, c_star) = split_sdr_solution(&sol.x);
        let mut candidates = sample_candidates(&c_star, &x, opts.n_rand, opts.seed)?;
        if let Some(extra) = block_sum_candidate(&x, &config)? {
            candidates.insert(0, extra);
        }
        let (c, report) = select_best_feasible(
            &candidates,
            &rm,
            &lobes,
            opts.eps_feas,
            sol.objective_value,
            opts.seed,
        )?;
        (c, sol, Some(report))
    };

    let c = scale_to_power(&c, config.e);
    let audit = ratio_violation(&c, &config, &audit_lobes)?;
    let mut out = assemble(
        config,
        c,
        &rm,
        LobeSpec::Regions { mainlobe, sidelobe },
        opts,
    )?;
    out.sdp = Some(sdp_info(&sol, audit));
    out.randomization = report;
    Ok(out)
}
