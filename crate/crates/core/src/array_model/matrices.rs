use std::f64::consts::PI;

use super::{AngularRegion, ArrayConfig};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, HermitianMatrix, C64};
use crate::quadrature::{CompositeRule, PANEL_ORDER};

pub const DEFAULT_NODES_PER_DEGREE: usize = 4;

/// Largest phase advance of `exp(jπ(M-1) sin θ)` allowed across one panel.
const MAX_PANEL_PHASE: f64 = 2.0;

/// Mainlobe/sidelobe integrals of `Ã(θ) = I_Q ⊗ a(θ)a^H(θ)` and their
/// `M × M` base blocks.
#[derive(Debug, Clone)]
pub struct RegionMatrices {
    pub config: ArrayConfig,
    pub a_ml: HermitianMatrix,
    pub a_sl: HermitianMatrix,
    pub a_ml_base: HermitianMatrix,
    pub a_sl_base: HermitianMatrix,
    /// Whether mainlobe and sidelobe together cover `[-90°, 90°]`.
    pub covers_span: bool,
}

impl RegionMatrices {
    /// Lifts base blocks to `I_Q ⊗ ·`.
    pub fn from_base(
        config: ArrayConfig,
        a_ml_base: HermitianMatrix,
        a_sl_base: HermitianMatrix,
        covers_span: bool,
    ) -> Self {
        RegionMatrices {
            config,
            a_ml: a_ml_base.kron_identity(config.q),
            a_sl: a_sl_base.kron_identity(config.q),
            a_ml_base,
            a_sl_base,
            covers_span,
        }
    }

    /// Single-angle mainlobe `a(θ_t) a^H(θ_t)`.
    pub fn point_mainlobe(
        config: ArrayConfig,
        theta_t: f64,
        sidelobe: &AngularRegion,
        nodes_per_degree: usize,
    ) -> Result<Self> {
        config.validate()?;
        let a = super::steering(theta_t, config.m)?;
        let ml = HermitianMatrix::outer(&a);
        let sl = region_matrix(sidelobe, config.m, nodes_per_degree)?;
        Ok(Self::from_base(config, ml, sl, false))
    }
}

fn panel_count(lo: f64, hi: f64, m: usize, nodes_per_degree: usize) -> usize {
    let width = hi - lo;
    let by_density = (width.to_degrees() * nodes_per_degree as f64 / PANEL_ORDER as f64).ceil();
    let by_phase = (PI * (m.saturating_sub(1)) as f64 * width / MAX_PANEL_PHASE).ceil();
    (by_density.max(by_phase) as usize).max(1)
}

/// First column `t_k = ∫ w(θ) exp(jπ k sin θ) dθ` of the Toeplitz integral.
fn toeplitz_column(
    region: &AngularRegion,
    m: usize,
    nodes_per_degree: usize,
    weight: impl Fn(f64) -> f64,
) -> Vec<C64> {
    let mut col = vec![C64::new(0.0, 0.0); m];
    for &(lo, hi) in region.intervals() {
        let rule = CompositeRule::new(
            lo,
            hi,
            panel_count(lo, hi, m, nodes_per_degree),
            PANEL_ORDER,
        );
        for (&theta, &w) in rule.nodes.iter().zip(&rule.weights) {
            let ww = w * weight(theta);
            let step = C64::from_polar(1.0, PI * theta.sin());
            let mut ph = C64::new(1.0, 0.0);
            for t in col.iter_mut() {
                *t += ph * ww;
                ph *= step;
            }
        }
    }
    col
}

fn toeplitz(col: &[C64]) -> HermitianMatrix {
    let m = col.len();
    let mut out = CMatrix::zeros(m, m);
    for i in 0..m {
        out[(i, i)] = C64::new(col[0].re, 0.0);
        for j in 0..i {
            out[(i, j)] = col[i - j];
            out[(j, i)] = col[i - j].conj();
        }
    }
    HermitianMatrix::hermitian_part(&out)
}

fn check_nodes(nodes_per_degree: usize) -> Result<()> {
    if nodes_per_degree == 0 {
        return Err(Error::Validation("nodes_per_degree must be >= 1".into()));
    }
    Ok(())
}

/// `∫_region a(θ) a^H(θ) dθ` (M × M). An empty region gives the zero matrix.
pub fn region_matrix(
    region: &AngularRegion,
    m: usize,
    nodes_per_degree: usize,
) -> Result<HermitianMatrix> {
    check_nodes(nodes_per_degree)?;
    if m == 0 {
        return Err(Error::Validation("antenna count must be >= 1".into()));
    }
    Ok(toeplitz(&toeplitz_column(
        region,
        m,
        nodes_per_degree,
        |_| 1.0,
    )))
}

/// `∫_region a(θ) a^H(θ) cos θ dθ`; over the full span this is exactly `2 I_M`.
pub fn region_matrix_cos_weighted(
    region: &AngularRegion,
    m: usize,
    nodes_per_degree: usize,
) -> Result<HermitianMatrix> {
    check_nodes(nodes_per_degree)?;
    Ok(toeplitz(&toeplitz_column(
        region,
        m,
        nodes_per_degree,
        f64::cos,
    )))
}

/// Integrates both regions and lifts them to `I_Q ⊗ ·`.
pub fn build_region_matrices(
    config: ArrayConfig,
    mainlobe: &AngularRegion,
    sidelobe: &AngularRegion,
    nodes_per_degree: usize,
) -> Result<RegionMatrices> {
    config.validate()?;
    if mainlobe.overlaps(sidelobe) {
        return Err(Error::Validation(
            "mainlobe and sidelobe regions overlap".into(),
        ));
    }
    let covers_span = mainlobe.covers_span_with(sidelobe);
    if !covers_span {
        log::warn!("mainlobe and sidelobe do not cover [-90°, 90°]; A_ml + A_sl may be singular");
    }
    let ml = region_matrix(mainlobe, config.m, nodes_per_degree)?;
    let sl = region_matrix(sidelobe, config.m, nodes_per_degree)?;
    Ok(RegionMatrices::from_base(config, ml, sl, covers_span))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{herm_eig, numerical_rank};

    #[test]
    fn full_span_two_elements() {
        // off-diagonal is π J0(π), from an independent Bessel evaluation
        let a = region_matrix(&AngularRegion::full(), 2, DEFAULT_NODES_PER_DEGREE).unwrap();
        let m = a.as_matrix();
        assert!((m[(0, 0)].re - PI).abs() < 1e-12);
        assert!((m[(1, 1)].re - PI).abs() < 1e-12);
        let expected = -0.955_804_990_198_846;
        assert!((m[(0, 1)].re - expected).abs() < 1e-12, "{}", m[(0, 1)]);
        assert!(m[(0, 1)].im.abs() < 1e-14);
    }

    #[test]
    fn scalar_array_gives_region_width() {
        let r = AngularRegion::from_degrees(&[(-70.0, -20.0), (5.0, 17.5)]).unwrap();
        let a = region_matrix(&r, 1, 4).unwrap();
        assert!((a.as_matrix()[(0, 0)].re - r.width()).abs() < 1e-13);
    }

    #[test]
    fn diagonal_is_width_and_empty_region_is_zero() {
        let r = AngularRegion::from_lobes_deg(&[(10.0, 22.0)]).unwrap();
        let a = region_matrix(&r, 6, 4).unwrap();
        for i in 0..6 {
            assert!((a.as_matrix()[(i, i)].re - r.width()).abs() < 1e-12);
        }
        let z = region_matrix(&AngularRegion::empty(), 4, 4).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn cos_weighted_full_span_is_twice_identity() {
        for m in [1, 2, 5, 8, 16] {
            let a = region_matrix_cos_weighted(&AngularRegion::full(), m, 4).unwrap();
            let err = (a.as_matrix() - CMatrix::identity(m, m) * C64::new(2.0, 0.0)).camax();
            assert!(err < 1e-10, "M={m}: {err:e}");
        }
    }

    #[test]
    fn kronecker_lift_is_structural() {
        let cfg = ArrayConfig::new(2, 2, 1.0).unwrap();
        let rm =
            build_region_matrices(cfg, &AngularRegion::full(), &AngularRegion::empty(), 4).unwrap();
        let base = region_matrix(&AngularRegion::full(), 2, 4).unwrap();
        assert_eq!(rm.a_ml.dim(), 4);
        assert_eq!(rm.a_ml, base.kron_identity(2));
        assert_eq!(rm.a_sl.max_abs(), 0.0);
    }

    #[test]
    fn overlapping_regions_rejected() {
        let cfg = ArrayConfig::new(4, 1, 1.0).unwrap();
        let ml = AngularRegion::from_degrees(&[(-15.0, 15.0)]).unwrap();
        let sl = AngularRegion::from_degrees(&[(10.0, 90.0)]).unwrap();
        assert!(build_region_matrices(cfg, &ml, &sl, 4).is_err());
    }

    #[test]
    fn narrow_mainlobe_is_rank_deficient() {
        let ml = AngularRegion::from_lobes_deg(&[(0.0, 22.0)]).unwrap();
        let a = region_matrix(&ml, 8, 4).unwrap();
        let r = numerical_rank(&herm_eig(&a).unwrap(), 1e-10);
        assert!(r < 8, "rank {r}");
    }

    #[test]
    fn lemma_one_bound_for_a_partition() {
        let cfg = ArrayConfig::new(8, 1, 1.0).unwrap();
        let ml = AngularRegion::from_lobes_deg(&[(0.0, 22.0)]).unwrap();
        let rm = build_region_matrices(cfg, &ml, &ml.complement(), 4).unwrap();
        assert!(rm.covers_span);
        let sum = &rm.a_ml + &rm.a_sl;
        let lmin = herm_eig(&sum).unwrap().min_eigenvalue();
        assert!(lmin >= 2.0 - 1e-8, "{lmin}");
    }
}
