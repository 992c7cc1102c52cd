use super::SdpProblem;
use crate::array_model::{steering, AngularRegion, ArrayConfig, RegionMatrices};
use crate::error::{Error, Result};
use crate::numerics::{herm_eig, CMatrix, CVector, HermitianMatrix, C64, PSD_NEG_TOL};

/// Ratio constraints `½ ≤ P(θ)/P(θ0) ≤ 1` for one contiguous mainlobe
/// interval, imposed on `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct LobeConstraint {
    pub interval: (f64, f64),
    pub theta0: f64,
    pub grid: Vec<f64>,
}

impl LobeConstraint {
    pub fn new(interval: (f64, f64), theta0: f64, grid: Vec<f64>) -> Result<Self> {
        let (lo, hi) = interval;
        let inside = |t: f64| t >= lo - 1e-12 && t <= hi + 1e-12;
        if !inside(theta0) {
            return Err(Error::Validation(format!(
                "reference angle {:.4}° outside mainlobe [{:.4}°, {:.4}°]",
                theta0.to_degrees(),
                lo.to_degrees(),
                hi.to_degrees()
            )));
        }
        if let Some(t) = grid.iter().find(|t| !inside(**t)) {
            return Err(Error::Validation(format!(
                "constraint angle {:.4}° outside mainlobe [{:.4}°, {:.4}°]",
                t.to_degrees(),
                lo.to_degrees(),
                hi.to_degrees()
            )));
        }
        Ok(LobeConstraint {
            interval,
            theta0,
            grid,
        })
    }
}

/// One constraint set per mainlobe interval: `θ0` at the interval center and
/// an evenly spaced grid (spacing at most `step_deg`) including both edges.
pub fn lobe_constraints(mainlobe: &AngularRegion, step_deg: f64) -> Result<Vec<LobeConstraint>> {
    if !(step_deg > 0.0) {
        return Err(Error::Validation(
            "constraint grid step must be positive".into(),
        ));
    }
    if mainlobe.is_empty() {
        return Err(Error::Validation("mainlobe region is empty".into()));
    }
    mainlobe
        .intervals()
        .iter()
        .map(|&(lo, hi)| {
            let n = ((hi - lo).to_degrees() / step_deg - 1e-9).ceil().max(1.0) as usize;
            let h = (hi - lo) / n as f64;
            let grid = (0..=n)
                .map(|k| if k == n { hi } else { lo + k as f64 * h })
                .collect();
            LobeConstraint::new((lo, hi), 0.5 * (lo + hi), grid)
        })
        .collect()
}

fn push_ratio_constraints(
    p: &mut SdpProblem,
    lobes: &[LobeConstraint],
    m: usize,
    lift: impl Fn(HermitianMatrix) -> HermitianMatrix,
) -> Result<()> {
    if lobes.is_empty() {
        return Err(Error::Validation(
            "at least one mainlobe constraint set is required".into(),
        ));
    }
    for lobe in lobes {
        let a0 = HermitianMatrix::outer(&steering(lobe.theta0, m)?);
        let half_a0 = a0.scale(0.5);
        for &t in &lobe.grid {
            let at = HermitianMatrix::outer(&steering(t, m)?);
            p.push_ineq(lift(&at - &a0), 0.0);
            p.push_ineq(lift(&half_a0 - &at), 0.0);
        }
    }
    Ok(())
}

/// Covariance program for `Q = M` over `R = C C^H` (M × M).
pub fn build_q_equals_m(
    config: &ArrayConfig,
    rm: &RegionMatrices,
    lobes: &[LobeConstraint],
) -> Result<SdpProblem> {
    config.validate()?;
    if config.q != config.m {
        return Err(Error::Validation(format!(
            "covariance program requires Q = M, got M = {}, Q = {}",
            config.m, config.q
        )));
    }
    let mut p = SdpProblem::new(rm.a_sl_base.clone());
    p.push_eq(rm.a_ml_base.clone(), 1.0);
    push_ratio_constraints(&mut p, lobes, config.m, |h| h)?;
    Ok(p)
}

/// Relaxation over the lifted `(MQ+1) × (MQ+1)` matrix `[[X, c], [c^H, 1]]`.
pub fn build_sdr(
    config: &ArrayConfig,
    rm: &RegionMatrices,
    lobes: &[LobeConstraint],
) -> Result<SdpProblem> {
    config.validate()?;
    let n = config.dim() + 1;
    let mut p = SdpProblem::new(rm.a_sl.embed(n));
    p.push_eq(rm.a_ml.embed(n), 1.0);
    let mut corner = vec![0.0; n];
    corner[n - 1] = 1.0;
    p.push_eq(HermitianMatrix::from_real_diagonal(&corner), 1.0);
    let q = config.q;
    push_ratio_constraints(&mut p, lobes, config.m, |h| h.kron_identity(q).embed(n))?;
    Ok(p)
}

/// Splits the lifted relaxation variable into `(X, c)`.
pub fn split_sdr_solution(lifted: &HermitianMatrix) -> (HermitianMatrix, CVector) {
    let n = lifted.dim() - 1;
    let x = lifted.principal_block(0, n);
    let c = lifted
        .as_matrix()
        .view((0, n), (n, 1))
        .column(0)
        .into_owned();
    (x, c)
}

/// `c = vec(U diag(√λ))` from `R = U Λ U^H`, rescaled to `‖c‖² = e`.
pub fn recover_c_from_r(r: &HermitianMatrix, e: f64) -> Result<CVector> {
    let eig = herm_eig(r)?;
    let lmax = eig.max_eigenvalue();
    if lmax <= 0.0 || eig.min_eigenvalue() < -PSD_NEG_TOL * lmax {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min_eigenvalue(),
            max_eigenvalue: lmax,
        });
    }
    let m = r.dim();
    let mut cm = CMatrix::zeros(m, m);
    for j in 0..m {
        let s = eig.eigenvalues[j].max(0.0).sqrt();
        for i in 0..m {
            cm[(i, j)] = eig.vectors[(i, j)] * s;
        }
    }
    let c = CVector::from_column_slice(cm.as_slice());
    let scale = (e / c.norm_squared()).sqrt();
    Ok(c * C64::new(scale, 0.0))
}
