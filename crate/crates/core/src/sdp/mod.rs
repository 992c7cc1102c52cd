//! Small dense semidefinite programs over Hermitian matrices.
//!
//! Complex problems are realified (`H ↦ [[Re H, -Im H], [Im H, Re H]]`) and
//! solved by an interior-point method on the real symmetric cone.

mod builders;
mod dump;
mod ipm;

pub use builders::{
    build_q_equals_m, build_sdr, lobe_constraints, recover_c_from_r, split_sdr_solution,
    LobeConstraint,
};
pub use dump::{parse_dump, write_dump, DUMP_MAGIC};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, HermitianMatrix, C64};

/// `min tr(C X)` s.t. `tr(A_i X) = b_i`, `tr(G_j X) ≤ h_j`, `X ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub dim: usize,
    pub objective: HermitianMatrix,
    pub eq_constraints: Vec<(HermitianMatrix, f64)>,
    pub ineq_constraints: Vec<(HermitianMatrix, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    Infeasible,
    Unbounded,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::MaxIter => "max_iter",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpTolerances {
    /// Internal stopping targets.
    pub gap_rel: f64,
    pub infeasibility: f64,
    pub max_iter: usize,
    /// Thresholds a returned `Optimal` status must meet.
    pub accept_gap_rel: f64,
    pub accept_infeasibility: f64,
}

impl Default for SdpTolerances {
    fn default() -> Self {
        SdpTolerances {
            gap_rel: 1e-10,
            infeasibility: 1e-10,
            max_iter: 200,
            accept_gap_rel: 1e-6,
            accept_infeasibility: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: HermitianMatrix,
    pub objective_value: f64,
    pub dual_objective: f64,
    /// `|p - d| / (1 + |p| + |d|)`.
    pub duality_gap_rel: f64,
    /// Largest of the relative primal, inequality and dual residuals.
    pub max_infeasibility: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    /// Multipliers for equalities followed by inequalities (`≤ 0`).
    pub y: Vec<f64>,
}

impl SdpSolution {
    /// Turns a non-optimal status into an error.
    pub fn require_optimal(self) -> Result<Self> {
        if self.status == SdpStatus::Optimal {
            return Ok(self);
        }
        Err(Error::Sdp {
            status: self.status.to_string(),
            gap: self.duality_gap_rel,
            infeasibility: self.max_infeasibility,
            detail: format!("after {} iterations", self.iterations),
        })
    }
}

impl SdpProblem {
    pub fn new(objective: HermitianMatrix) -> Self {
        SdpProblem {
            dim: objective.dim(),
            objective,
            eq_constraints: Vec::new(),
            ineq_constraints: Vec::new(),
        }
    }

    pub fn push_eq(&mut self, a: HermitianMatrix, b: f64) {
        self.eq_constraints.push((a, b));
    }

    pub fn push_ineq(&mut self, g: HermitianMatrix, h: f64) {
        self.ineq_constraints.push((g, h));
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.objective.dim() != self.dim {
            return Err(Error::Validation("SDP objective dimension mismatch".into()));
        }
        let rows = self.eq_constraints.iter().chain(&self.ineq_constraints);
        for (i, (a, b)) in rows.enumerate() {
            if a.dim() != self.dim {
                return Err(Error::Validation(format!(
                    "SDP constraint {i} is {}x{}, expected {}x{}",
                    a.dim(),
                    a.dim(),
                    self.dim,
                    self.dim
                )));
            }
            if !b.is_finite() {
                return Err(Error::Validation(format!(
                    "SDP constraint {i} has non-finite bound"
                )));
            }
        }
        if self.eq_constraints.is_empty() && self.ineq_constraints.is_empty() {
            return Err(Error::Validation("SDP has no constraints".into()));
        }
        Ok(())
    }

    /// Primal objective, worst relative constraint violation.
    pub fn evaluate(&self, x: &HermitianMatrix) -> (f64, f64) {
        let obj = self.objective.trace_product(x);
        let mut viol: f64 = 0.0;
        for (a, b) in &self.eq_constraints {
            viol = viol.max((a.trace_product(x) - b).abs() / (1.0 + b.abs()));
        }
        for (g, h) in &self.ineq_constraints {
            viol = viol.max((g.trace_product(x) - h).max(0.0) / (1.0 + h.abs()));
        }
        (obj, viol)
    }
}

fn realify_matrix(h: &HermitianMatrix) -> HermitianMatrix {
    let n = h.dim();
    let m = h.as_matrix();
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[(i, j)] = C64::new(z.re, 0.0);
            out[(i + n, j + n)] = C64::new(z.re, 0.0);
            out[(i, j + n)] = C64::new(-z.im, 0.0);
            out[(i + n, j)] = C64::new(z.im, 0.0);
        }
    }
    HermitianMatrix::hermitian_part(&out)
}

/// Real symmetric embedding of dimension `2n`; bounds are doubled so the
/// optimal value doubles exactly.
pub fn realify(p: &SdpProblem) -> SdpProblem {
    SdpProblem {
        dim: 2 * p.dim,
        objective: realify_matrix(&p.objective),
        eq_constraints: p
            .eq_constraints
            .iter()
            .map(|(a, b)| (realify_matrix(a), 2.0 * b))
            .collect(),
        ineq_constraints: p
            .ineq_constraints
            .iter()
            .map(|(g, h)| (realify_matrix(g), 2.0 * h))
            .collect(),
    }
}

/// Inverse of the realification map on a `2n × 2n` real symmetric `Y`.
pub fn unrealify(y: &DMatrix<f64>) -> HermitianMatrix {
    let n = y.nrows() / 2;
    let out = CMatrix::from_fn(n, n, |i, j| {
        C64::new(
            0.5 * (y[(i, j)] + y[(i + n, j + n)]),
            0.5 * (y[(i + n, j)] - y[(i, j + n)]),
        )
    });
    HermitianMatrix::hermitian_part(&out)
}

fn real_part(h: &HermitianMatrix) -> DMatrix<f64> {
    h.as_matrix().map(|z| z.re)
}

pub fn solve_sdp(p: &SdpProblem, tol: &SdpTolerances) -> Result<SdpSolution> {
    p.validate()?;
    let rp = realify(p);
    let n_eq = rp.eq_constraints.len();
    let rows: Vec<(&HermitianMatrix, f64, bool)> = rp
        .eq_constraints
        .iter()
        .map(|(a, b)| (a, *b, false))
        .chain(rp.ineq_constraints.iter().map(|(g, h)| (g, *h, true)))
        .collect();

    let data_scale = rows
        .iter()
        .map(|(a, _, _)| a.frobenius_norm())
        .fold(rp.objective.frobenius_norm(), f64::max)
        .max(1e-300);
    let obj_scale = rp
        .objective
        .frobenius_norm()
        .max(1e-3 * data_scale)
        .max(1e-300);

    let mut kept = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut slack_rows = Vec::new();
    let mut row_scale = Vec::new();
    let mut trivially_infeasible = false;
    for (idx, &(mat, rhs, is_ineq)) in rows.iter().enumerate() {
        let norm = mat.frobenius_norm();
        if norm <= 1e-14 * data_scale {
            // 0 = rhs or 0 ≤ rhs
            let ok = if is_ineq {
                rhs >= -1e-12
            } else {
                rhs.abs() <= 1e-12
            };
            trivially_infeasible |= !ok;
            continue;
        }
        if is_ineq {
            slack_rows.push(a.len());
        }
        a.push(real_part(mat) / norm);
        b.push(rhs / norm);
        kept.push(idx);
        row_scale.push(norm);
    }

    let n_rows = rows.len();
    let blank = |status: SdpStatus| SdpSolution {
        x: HermitianMatrix::zeros(p.dim),
        objective_value: f64::NAN,
        dual_objective: f64::NAN,
        duality_gap_rel: f64::INFINITY,
        max_infeasibility: f64::INFINITY,
        status,
        iterations: 0,
        y: vec![0.0; n_rows],
    };
    if trivially_infeasible {
        return Ok(blank(SdpStatus::Infeasible));
    }
    if a.is_empty() {
        return Err(Error::Validation("SDP has only vacuous constraints".into()));
    }

    let real = ipm::RealProblem {
        n: rp.dim,
        c: real_part(&rp.objective) / obj_scale,
        a,
        b,
        slack_rows,
    };
    let sol = ipm::solve(&real, tol);

    let mut y = vec![0.0; n_rows];
    for (k, &idx) in kept.iter().enumerate() {
        y[idx] = sol.y[k] * obj_scale / row_scale[k];
    }
    let x = unrealify(&sol.x);
    let (pobj, primal_viol) = p.evaluate(&x);
    let dobj: f64 = p
        .eq_constraints
        .iter()
        .chain(&p.ineq_constraints)
        .zip(&y)
        .map(|((_, bi), yi)| bi * yi)
        .sum();
    // dual residual on the complex data: C - Σ y A - Z
    let mut dres = p.objective.as_matrix().clone();
    for ((mat, _), yi) in p.eq_constraints.iter().chain(&p.ineq_constraints).zip(&y) {
        dres -= mat.as_matrix() * C64::new(*yi, 0.0);
    }
    dres -= unrealify(&sol.z).into_matrix() * C64::new(obj_scale, 0.0);
    let dual_viol = dres.norm() / (1.0 + p.objective.frobenius_norm());
    let sign_viol =
        y[n_eq..].iter().fold(0.0_f64, |m, &v| m.max(v)) / (1.0 + p.objective.frobenius_norm());

    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    let infeas = primal_viol.max(dual_viol).max(sign_viol);
    let mut status = sol.status;
    if status == SdpStatus::Optimal
        && (gap > tol.accept_gap_rel || infeas > tol.accept_infeasibility)
    {
        status = SdpStatus::MaxIter;
    }
    Ok(SdpSolution {
        x,
        objective_value: pobj,
        dual_objective: dobj,
        duality_gap_rel: gap,
        max_infeasibility: infeas,
        status,
        iterations: sol.iterations,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn min_eigenvalue_program() {
        let mut p = SdpProblem::new(HermitianMatrix::from_real_diagonal(&[1.0, 3.0]));
        p.push_eq(HermitianMatrix::identity(2), 1.0);
        let s = solve_sdp(&p, &SdpTolerances::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-8);
        let x = s.x.as_matrix();
        assert!((x[(0, 0)].re - 1.0).abs() < 1e-7 && x[(1, 1)].re.abs() < 1e-7);
        assert!(s.objective_value >= s.dual_objective - 1e-6);
    }

    #[test]
    fn realify_examples() {
        let r = realify_matrix(&HermitianMatrix::identity(3));
        assert_eq!(r, HermitianMatrix::identity(6));
        let h = HermitianMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)],
        ))
        .unwrap();
        let r = realify_matrix(&h).as_matrix().map(|z| z.re);
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 0.0, -1.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                -1.0, 0.0, 0.0, 0.0,
            ],
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn unrealify_inverts_realify() {
        let h = HermitianMatrix::hermitian_part(&CMatrix::from_fn(3, 3, |i, j| {
            c((i + j) as f64, i as f64 - 2.0 * j as f64)
        }));
        let back = unrealify(&real_part(&realify_matrix(&h)));
        assert!((back.as_matrix() - h.as_matrix()).norm() < 1e-14);
    }

    #[test]
    fn infeasible_program_detected() {
        // tr X = 1 and tr X ≤ -1
        let mut p = SdpProblem::new(HermitianMatrix::identity(2));
        p.push_eq(HermitianMatrix::identity(2), 1.0);
        p.push_ineq(HermitianMatrix::identity(2), -1.0);
        let s = solve_sdp(&p, &SdpTolerances::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Infeasible);
        assert!(s.require_optimal().is_err());
    }

    #[test]
    fn unbounded_program_detected() {
        // min -X11 s.t. X22 = 1
        let mut p = SdpProblem::new(HermitianMatrix::from_real_diagonal(&[-1.0, 0.0]));
        p.push_eq(HermitianMatrix::from_real_diagonal(&[0.0, 1.0]), 1.0);
        let s = solve_sdp(&p, &SdpTolerances::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Unbounded);
    }
}
