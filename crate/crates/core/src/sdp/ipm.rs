//! Infeasible primal-dual path-following method (HKM direction, Mehrotra
//! predictor-corrector) on the cone `S^n_+ × R^k_+`.
//!
//! Primal: `min <C, X>` s.t. `<A_i, X> + s_{σ(i)} = b_i`, with a slack only on
//! inequality rows. Dual: `Z = C - Σ y_i A_i ⪰ 0`, `z_j = -y_{row(j)} ≥ 0`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::{SdpStatus, SdpTolerances};

pub(crate) struct RealProblem {
    pub n: usize,
    pub c: DMatrix<f64>,
    pub a: Vec<DMatrix<f64>>,
    pub b: Vec<f64>,
    /// Row index of each slack variable.
    pub slack_rows: Vec<usize>,
}

pub(crate) struct RealSolution {
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    pub z: DMatrix<f64>,
    pub status: SdpStatus,
    pub iterations: usize,
}

struct Iterate {
    x: DMatrix<f64>,
    z: DMatrix<f64>,
    y: DVector<f64>,
    s: DVector<f64>,
    zs: DVector<f64>,
}

struct Residuals {
    rp: DVector<f64>,
    rd: DMatrix<f64>,
    rd_s: DVector<f64>,
    mu: f64,
    gap: f64,
    pinf: f64,
    dinf: f64,
    pobj: f64,
    dobj: f64,
}

struct Direction {
    dx: DMatrix<f64>,
    dz: DMatrix<f64>,
    dy: DVector<f64>,
    ds: DVector<f64>,
    dzs: DVector<f64>,
}

fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `α` with `M + α D ⪰ 0`, or infinity.
fn max_step_psd(m: &DMatrix<f64>, d: &DMatrix<f64>) -> Option<f64> {
    let l = Cholesky::new(m.clone())?.l();
    let li = l.solve_lower_triangular(&DMatrix::identity(m.nrows(), m.nrows()))?;
    let t = sym(&(&li * d * li.transpose()));
    let lmin = SymmetricEigen::new(t).eigenvalues.min();
    Some(if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    })
}

fn max_step_lp(v: &DVector<f64>, d: &DVector<f64>) -> f64 {
    v.iter()
        .zip(d.iter())
        .filter(|(_, &di)| di < 0.0)
        .map(|(&vi, &di)| -vi / di)
        .fold(f64::INFINITY, f64::min)
}

impl RealProblem {
    fn apply(&self, x: &DMatrix<f64>, s: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::from_iterator(self.a.len(), self.a.iter().map(|a| dot(a, x)));
        for (j, &row) in self.slack_rows.iter().enumerate() {
            out[row] += s[j];
        }
        out
    }

    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (a, &yi) in self.a.iter().zip(y.iter()) {
            if yi != 0.0 {
                out += a * yi;
            }
        }
        out
    }

    fn residuals(&self, it: &Iterate, b: &DVector<f64>, bnorm: f64, cnorm: f64) -> Residuals {
        let rp = b - self.apply(&it.x, &it.s);
        let rd = &self.c - self.adjoint(&it.y) - &it.z;
        let rd_s = DVector::from_iterator(
            self.slack_rows.len(),
            self.slack_rows
                .iter()
                .enumerate()
                .map(|(j, &r)| -it.y[r] - it.zs[j]),
        );
        let nn = (self.n + self.slack_rows.len()) as f64;
        let mu = (dot(&it.x, &it.z) + it.s.dot(&it.zs)) / nn;
        let pobj = dot(&self.c, &it.x);
        let dobj = b.dot(&it.y);
        Residuals {
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
            pinf: rp.norm() / (1.0 + bnorm),
            dinf: (rd.norm_squared() + rd_s.norm_squared()).sqrt() / (1.0 + cnorm),
            rp,
            rd,
            rd_s,
            mu,
            pobj,
            dobj,
        }
    }

    fn initial_point(&self) -> Iterate {
        let n = self.n as f64;
        let mut xi = 10.0_f64.max(n.sqrt());
        let mut eta = 10.0_f64.max(n.sqrt()).max(self.c.norm());
        for (a, &bi) in self.a.iter().zip(&self.b) {
            let an = a.norm();
            xi = xi.max(n * (1.0 + bi.abs()) / (1.0 + an));
            eta = eta.max(an);
        }
        let k = self.slack_rows.len();
        Iterate {
            x: DMatrix::identity(self.n, self.n) * xi,
            z: DMatrix::identity(self.n, self.n) * eta,
            y: DVector::zeros(self.a.len()),
            s: DVector::from_element(k, xi),
            zs: DVector::from_element(k, eta),
        }
    }
}

pub(crate) fn solve(p: &RealProblem, tol: &SdpTolerances) -> RealSolution {
    let m = p.a.len();
    let k = p.slack_rows.len();
    let b = DVector::from_column_slice(&p.b);
    let bnorm = b.norm();
    let cnorm = p.c.norm();
    let mut slack_of_row = vec![None; m];
    for (j, &r) in p.slack_rows.iter().enumerate() {
        slack_of_row[r] = Some(j);
    }

    let mut it = p.initial_point();
    let mut best: Option<(f64, Iterate, usize)> = None;
    let mut stalled = 0usize;
    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;

    for iter in 0..tol.max_iter {
        iterations = iter;
        let res = p.residuals(&it, &b, bnorm, cnorm);
        let merit = res.gap.max(res.pinf).max(res.dinf);
        if !merit.is_finite() {
            break;
        }
        if best.as_ref().is_none_or(|(bm, _, _)| merit < *bm) {
            best = Some((
                merit,
                Iterate {
                    x: it.x.clone(),
                    z: it.z.clone(),
                    y: it.y.clone(),
                    s: it.s.clone(),
                    zs: it.zs.clone(),
                },
                iter,
            ));
        }
        if res.gap <= tol.gap_rel && res.pinf <= tol.infeasibility && res.dinf <= tol.infeasibility
        {
            status = SdpStatus::Optimal;
            break;
        }
        // Farkas ray for the primal: -Σ y A ⪰ 0 with b·y > 0
        let cmr = (&p.c - &res.rd).norm();
        if res.dobj > 0.0 && cmr < 1e-8 * res.dobj && res.pinf > tol.infeasibility {
            status = SdpStatus::Infeasible;
            break;
        }
        // primal ray: A(X) ≈ 0, X ⪰ 0, <C, X> < 0
        let ax = (&b - &res.rp).norm();
        if res.pobj < 0.0 && ax < 1e-8 * (-res.pobj) && res.dinf > tol.infeasibility {
            status = SdpStatus::Unbounded;
            break;
        }

        let Some(zchol) = Cholesky::new(it.z.clone()) else {
            break;
        };
        let zinv = zchol.inverse();

        let w: Vec<DMatrix<f64>> = p.a.iter().map(|a| &it.x * a * &zinv).collect();
        let mut schur = DMatrix::zeros(m, m);
        for j in 0..m {
            for i in 0..=j {
                let v = dot(&p.a[i], &w[j]);
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        for (j, &r) in p.slack_rows.iter().enumerate() {
            schur[(r, r)] += it.s[j] / it.zs[j];
        }
        let schur_chol = match Cholesky::new(schur.clone()) {
            Some(c) => c,
            None => {
                let bump = 1e-13 * schur.diagonal().amax().max(1e-300);
                let mut reg = schur;
                for i in 0..m {
                    reg[(i, i)] += bump;
                }
                match Cholesky::new(reg) {
                    Some(c) => c,
                    None => break,
                }
            }
        };

        let direction = |target: f64, corr: Option<(&DMatrix<f64>, &DVector<f64>)>| -> Direction {
            let mut rx = &zinv * target - &it.x - &it.x * &res.rd * &zinv;
            if let Some((cx, _)) = corr {
                rx -= cx;
            }
            let mut ls = DVector::zeros(k);
            for j in 0..k {
                let mut v = target / it.zs[j] - it.s[j] - it.s[j] / it.zs[j] * res.rd_s[j];
                if let Some((_, cs)) = corr {
                    v -= cs[j];
                }
                ls[j] = v;
            }
            let mut rhs = res.rp.clone();
            for i in 0..m {
                rhs[i] -= dot(&p.a[i], &rx);
                if let Some(j) = slack_of_row[i] {
                    rhs[i] -= ls[j];
                }
            }
            let dy = schur_chol.solve(&rhs);
            let dz = &res.rd - p.adjoint(&dy);
            let dzs = DVector::from_iterator(
                k,
                p.slack_rows
                    .iter()
                    .enumerate()
                    .map(|(j, &r)| res.rd_s[j] - dy[r]),
            );
            let mut dx = &zinv * target - &it.x - &it.x * &dz * &zinv;
            if let Some((cx, _)) = corr {
                dx -= cx;
            }
            let dx = sym(&dx);
            let mut ds = DVector::zeros(k);
            for j in 0..k {
                let mut v = target / it.zs[j] - it.s[j] - it.s[j] / it.zs[j] * dzs[j];
                if let Some((_, cs)) = corr {
                    v -= cs[j];
                }
                ds[j] = v;
            }
            Direction {
                dx,
                dz,
                dy,
                ds,
                dzs,
            }
        };

        let steps = |d: &Direction| -> Option<(f64, f64)> {
            let ap = max_step_psd(&it.x, &d.dx)?.min(max_step_lp(&it.s, &d.ds));
            let ad = max_step_psd(&it.z, &d.dz)?.min(max_step_lp(&it.zs, &d.dzs));
            Some((ap, ad))
        };

        let pred = direction(0.0, None);
        let Some((ap, ad)) = steps(&pred) else { break };
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let nn = (p.n + k) as f64;
        let x_aff = &it.x + &pred.dx * ap;
        let z_aff = &it.z + &pred.dz * ad;
        let s_aff = &it.s + &pred.ds * ap;
        let zs_aff = &it.zs + &pred.dzs * ad;
        let mu_aff = (dot(&x_aff, &z_aff) + s_aff.dot(&zs_aff)) / nn;
        let sigma = (mu_aff / res.mu).clamp(0.0, 1.0).powi(3);

        let corr_x = &pred.dx * &pred.dz * &zinv;
        let corr_s = pred.ds.component_mul(&pred.dzs).component_div(&it.zs);
        let dir = direction(sigma * res.mu, Some((&corr_x, &corr_s)));
        let Some((ap_max, ad_max)) = steps(&dir) else {
            break;
        };
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let ap = (gamma * ap_max).min(1.0);
        let ad = (gamma * ad_max).min(1.0);

        it.x = sym(&(&it.x + &dir.dx * ap));
        it.s += &dir.ds * ap;
        it.y += &dir.dy * ad;
        it.z = sym(&(&it.z + &dir.dz * ad));
        it.zs += &dir.dzs * ad;

        if ap.max(ad) < 1e-7 {
            stalled += 1;
            if stalled >= 6 {
                if res.pinf > tol.accept_infeasibility {
                    status = SdpStatus::Infeasible;
                }
                break;
            }
        } else {
            stalled = 0;
        }
        iterations = iter + 1;
    }

    if status == SdpStatus::Optimal
        || status == SdpStatus::Infeasible
        || status == SdpStatus::Unbounded
    {
        return RealSolution {
            x: it.x,
            y: it.y.as_slice().to_vec(),
            z: it.z,
            status,
            iterations,
        };
    }
    // stopped early: fall back to the best iterate seen
    let (merit, b_it, _) = best.unwrap_or((f64::INFINITY, it, 0));
    let stopped_early = iterations + 1 < tol.max_iter;
    let status = if stopped_early && merit <= tol.accept_infeasibility.min(tol.accept_gap_rel) {
        SdpStatus::Optimal
    } else {
        SdpStatus::MaxIter
    };
    RealSolution {
        x: b_it.x,
        y: b_it.y.as_slice().to_vec(),
        z: b_it.z,
        status,
        iterations,
    }
}
