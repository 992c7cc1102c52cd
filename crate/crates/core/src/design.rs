//! Coefficient designs: minimum ISL by the closed form, the narrow-beam
//! variant, and the phased-array baseline.

use serde::{Deserialize, Serialize};

use crate::array_model::{
    beampattern, half_power_edges, isl_ratio, psl_db, radiated_energy, steering, AngularRegion,
    ArrayConfig, BeampatternSamples, RegionMatrices, DEFAULT_NODES_PER_DEGREE, HALF_PI,
};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector, C64, DEFAULT_RANK_TOL};
use crate::rayleigh::{solve_min_ratio_with, Branch};
use crate::sdp::SdpTolerances;
use crate::sdr_recovery::RandomizationReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    pub grid_step_deg: f64,
    pub nodes_per_degree: usize,
    pub rank_tol: f64,
    pub constraint_grid_step_deg: f64,
    pub n_rand: usize,
    pub seed: u64,
    pub eps_feas: f64,
    pub sdp: SdpTolerances,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            grid_step_deg: 0.25,
            nodes_per_degree: DEFAULT_NODES_PER_DEGREE,
            rank_tol: DEFAULT_RANK_TOL,
            constraint_grid_step_deg: 0.5,
            n_rand: 1000,
            seed: 42,
            eps_feas: 1e-6,
            sdp: SdpTolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeWidth {
    pub center_deg: f64,
    /// `None` when the lobe has no half-power crossing on some side.
    pub width_deg: Option<f64>,
    pub edges_deg: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub isl_ratio: f64,
    pub psl_db: Option<f64>,
    /// Width of the first lobe.
    pub width_3db: Option<f64>,
    pub lobes: Vec<LobeWidth>,
    /// `∫ P(θ) cos θ dθ / (2E)`; equals 1 for exact power normalization.
    pub energy_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosedFormInfo {
    pub rank_used: usize,
    pub branch: Branch,
    pub reduced_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpInfo {
    pub status: String,
    pub objective: f64,
    pub duality_gap_rel: f64,
    pub max_infeasibility: f64,
    pub iterations: usize,
    /// Rank of the solution matrix at the default tolerance.
    pub solution_rank: usize,
    /// Worst violation of the ratio constraints on a 4× finer audit grid.
    pub audit_violation: f64,
}

#[derive(Debug, Clone)]
pub struct CoefficientSolution {
    pub config: ArrayConfig,
    /// `vec{C}`, column-major.
    pub c: CVector,
    pub objective: f64,
    pub beampattern: BeampatternSamples,
    pub metrics: Metrics,
    pub closed_form: Option<ClosedFormInfo>,
    pub sdp: Option<SdpInfo>,
    pub randomization: Option<RandomizationReport>,
}

impl CoefficientSolution {
    /// `C` as an `M × Q` matrix.
    pub fn coefficient_matrix(&self) -> CMatrix {
        CMatrix::from_column_slice(self.config.m, self.config.q, self.c.as_slice())
    }
}

/// Where widths are measured and which samples count as sidelobes.
pub(crate) enum LobeSpec<'a> {
    Regions {
        mainlobe: &'a AngularRegion,
        sidelobe: &'a AngularRegion,
    },
    /// Single beam at `θ_t`; sidelobes lie outside the first nulls.
    Steered(f64),
}

pub(crate) fn scale_to_power(r: &CVector, e: f64) -> CVector {
    r * C64::new((e / r.norm_squared()).sqrt(), 0.0)
}

fn lobe_width(samples: &BeampatternSamples, hint: &AngularRegion, center: f64) -> LobeWidth {
    let edges = half_power_edges(samples, hint).ok();
    LobeWidth {
        center_deg: center.to_degrees(),
        width_deg: edges.map(|(l, r)| r - l),
        edges_deg: edges,
    }
}

/// Complement of the main beam between the nulls flanking the peak nearest
/// `theta_t`.
pub fn beyond_first_nulls(samples: &BeampatternSamples, theta_t: f64) -> AngularRegion {
    let (g, v) = (&samples.grid, &samples.values);
    if g.is_empty() {
        return AngularRegion::empty();
    }
    let mut i = g
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - theta_t).abs().total_cmp(&(b.1 - theta_t).abs()))
        .map_or(0, |(i, _)| i);
    while i + 1 < g.len() && v[i + 1] > v[i] {
        i += 1;
    }
    while i > 0 && v[i - 1] > v[i] {
        i -= 1;
    }
    let (mut lo, mut hi) = (i, i);
    while lo > 0 && v[lo - 1] <= v[lo] {
        lo -= 1;
    }
    while hi + 1 < g.len() && v[hi + 1] <= v[hi] {
        hi += 1;
    }
    AngularRegion::new(vec![(g[lo].max(-HALF_PI), g[hi].min(HALF_PI))])
        .map(|r| r.complement())
        .unwrap_or_default()
}

fn steered_hint(theta_t: f64, m: usize) -> AngularRegion {
    let half = (90.0 / m as f64).min(5.0).to_radians();
    AngularRegion::new(vec![(
        (theta_t - half).max(-HALF_PI),
        (theta_t + half).min(HALF_PI),
    )])
    .unwrap_or_else(|_| AngularRegion::full())
}

pub(crate) fn assemble(
    config: ArrayConfig,
    c: CVector,
    rm: &RegionMatrices,
    lobes: LobeSpec<'_>,
    opts: &DesignOptions,
) -> Result<CoefficientSolution> {
    let grid = BeampatternSamples::uniform_grid(opts.grid_step_deg)?;
    let bp = beampattern(&c, &config, &grid)?;
    let isl = isl_ratio(&c, rm)?;
    let (lobe_widths, psl) = match lobes {
        LobeSpec::Regions { mainlobe, sidelobe } => {
            let widths = mainlobe
                .intervals()
                .iter()
                .map(|&(lo, hi)| {
                    let hint = AngularRegion::new(vec![(lo, hi)])?;
                    Ok(lobe_width(&bp, &hint, 0.5 * (lo + hi)))
                })
                .collect::<Result<Vec<_>>>()?;
            (widths, psl_db(&bp, sidelobe).ok())
        }
        LobeSpec::Steered(theta_t) => {
            let hint = steered_hint(theta_t, config.m);
            let side = beyond_first_nulls(&bp, theta_t);
            (
                vec![lobe_width(&bp, &hint, theta_t)],
                psl_db(&bp, &side).ok(),
            )
        }
    };
    let energy_ratio = radiated_energy(&c, &config)? / (2.0 * config.e);
    Ok(CoefficientSolution {
        config,
        objective: isl,
        beampattern: bp,
        metrics: Metrics {
            isl_ratio: isl,
            psl_db: psl,
            width_3db: lobe_widths.first().and_then(|l| l.width_deg),
            lobes: lobe_widths,
            energy_ratio,
        },
        c,
        closed_form: None,
        sdp: None,
        randomization: None,
    })
}

fn closed_form(rm: &RegionMatrices, opts: &DesignOptions) -> Result<(CVector, ClosedFormInfo)> {
    let sol = solve_min_ratio_with(&rm.a_sl, &rm.a_ml, opts.rank_tol)?;
    let info = ClosedFormInfo {
        rank_used: sol.rank_used,
        branch: sol.branch,
        reduced_eigenvalue: sol.reduced_eigenvalue,
    };
    Ok((scale_to_power(&sol.r, rm.config.e), info))
}

/// Minimizes `c^H A_sl c / c^H A_ml c` and normalizes to `‖c‖² = E`.
pub fn design_min_isl(
    config: ArrayConfig,
    mainlobe: &AngularRegion,
    sidelobe: &AngularRegion,
    opts: &DesignOptions,
) -> Result<CoefficientSolution> {
    let rm = crate::array_model::build_region_matrices(
        config,
        mainlobe,
        sidelobe,
        opts.nodes_per_degree,
    )?;
    let (c, info) = closed_form(&rm, opts)?;
    let mut sol = assemble(
        config,
        c,
        &rm,
        LobeSpec::Regions { mainlobe, sidelobe },
        opts,
    )?;
    sol.closed_form = Some(info);
    Ok(sol)
}

/// Closed-form design with the mainlobe collapsed to `a(θ_t) a^H(θ_t)`.
pub fn design_narrow_beam(
    config: ArrayConfig,
    theta_t: f64,
    sidelobe: &AngularRegion,
    opts: &DesignOptions,
) -> Result<CoefficientSolution> {
    if !(theta_t.abs() < HALF_PI) {
        return Err(Error::Validation(format!(
            "target angle {:.4}° must lie strictly inside (-90°, 90°)",
            theta_t.to_degrees()
        )));
    }
    let rm = RegionMatrices::point_mainlobe(config, theta_t, sidelobe, opts.nodes_per_degree)?;
    let (c, info) = closed_form(&rm, opts)?;
    let mut sol = assemble(config, c, &rm, LobeSpec::Steered(theta_t), opts)?;
    sol.closed_form = Some(info);
    Ok(sol)
}

/// Phased-array weights `a(θ_t) √(E/M)`.
pub fn cpa_weights(m: usize, theta_t: f64, e: f64) -> Result<CVector> {
    Ok(steering(theta_t, m)? * C64::new((e / m as f64).sqrt(), 0.0))
}

pub fn cpa_baseline(m: usize, theta_t: f64, e: f64, grid: &[f64]) -> Result<BeampatternSamples> {
    let config = ArrayConfig::new(m, 1, e)?;
    beampattern(&cpa_weights(m, theta_t, e)?, &config, grid)
}

/// Phased-array design wrapped with the same metrics as the other methods.
pub fn design_cpa(
    config: ArrayConfig,
    theta_t: f64,
    sidelobe: &AngularRegion,
    opts: &DesignOptions,
) -> Result<CoefficientSolution> {
    let cfg = ArrayConfig::new(config.m, 1, config.e)?;
    let rm = RegionMatrices::point_mainlobe(cfg, theta_t, sidelobe, opts.nodes_per_degree)?;
    let c = cpa_weights(cfg.m, theta_t, cfg.e)?;
    assemble(cfg, c, &rm, LobeSpec::Steered(theta_t), opts)
}
