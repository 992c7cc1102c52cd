use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::array_model::{
    build_region_matrices, isl_ratio, AngularRegion, ArrayConfig, RegionMatrices,
};
use crate::design::{
    design_cpa, design_min_isl, design_narrow_beam, ClosedFormInfo, CoefficientSolution,
    DesignOptions, Metrics, SdpInfo,
};
use crate::error::{Error, Result};
use crate::numerics::{CVector, C64};
use crate::sdp::{build_q_equals_m, build_sdr, lobe_constraints, write_dump, SdpProblem};
use crate::sdr_recovery::{design_with_beamwidth, RandomizationReport};

pub const SCHEMA: &str = "beamforge/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    BeamwidthConstrained,
    NarrowBeam,
    Cpa,
}

fn default_grid_step() -> f64 {
    0.25
}
fn default_constraint_step() -> f64 {
    0.5
}
fn default_seed() -> u64 {
    42
}
fn default_n_rand() -> usize {
    1000
}

/// One design run as read from a TOML file. Angles are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub config: ArrayConfig,
    /// `(center, width)` pairs.
    #[serde(default)]
    pub mainlobes: Vec<(f64, f64)>,
    pub method: Method,
    #[serde(default)]
    pub theta_t_deg: Option<f64>,
    #[serde(default = "default_grid_step")]
    pub grid_step_deg: f64,
    #[serde(default = "default_constraint_step")]
    pub constraint_grid_step_deg: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_n_rand")]
    pub n_rand: usize,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
            || self.name.starts_with('.')
        {
            return Err(Error::Config(format!(
                "scenario name {:?} must be non-empty and use only [A-Za-z0-9._-]",
                self.name
            )));
        }
        self.config.validate()?;
        let ml = self.mainlobe()?;
        match self.method {
            Method::ClosedForm | Method::BeamwidthConstrained if ml.is_empty() => {
                return Err(Error::Config(
                    "this method needs at least one mainlobe".into(),
                ));
            }
            Method::NarrowBeam | Method::Cpa => {
                let t = self.theta_t_deg.ok_or_else(|| {
                    Error::Config("theta_t_deg is required for narrow_beam and cpa".into())
                })?;
                if !(t.abs() < 90.0) {
                    return Err(Error::Config(format!(
                        "theta_t_deg = {t} must lie in (-90, 90)"
                    )));
                }
            }
            _ => {}
        }
        for (key, v) in [
            ("grid_step_deg", self.grid_step_deg),
            ("constraint_grid_step_deg", self.constraint_grid_step_deg),
        ] {
            if !(v > 0.0 && v <= 90.0) {
                return Err(Error::Config(format!("{key} must be in (0, 90], got {v}")));
            }
        }
        if self.method == Method::BeamwidthConstrained
            && self.config.q != self.config.m
            && self.n_rand == 0
        {
            return Err(Error::Config(
                "n_rand must be positive for the relaxation pipeline".into(),
            ));
        }
        Ok(())
    }

    pub fn mainlobe(&self) -> Result<AngularRegion> {
        AngularRegion::from_lobes_deg(&self.mainlobes)
    }

    pub fn sidelobe(&self) -> Result<AngularRegion> {
        Ok(self.mainlobe()?.complement())
    }

    pub fn options(&self) -> DesignOptions {
        DesignOptions {
            grid_step_deg: self.grid_step_deg,
            constraint_grid_step_deg: self.constraint_grid_step_deg,
            seed: self.seed,
            n_rand: self.n_rand,
            ..DesignOptions::default()
        }
    }

    pub fn design(&self) -> Result<CoefficientSolution> {
        self.validate()?;
        let (ml, sl, opts) = (self.mainlobe()?, self.sidelobe()?, self.options());
        let theta_t = self.theta_t_deg.unwrap_or(0.0).to_radians();
        match self.method {
            Method::ClosedForm => design_min_isl(self.config, &ml, &sl, &opts),
            Method::BeamwidthConstrained => design_with_beamwidth(self.config, &ml, &sl, &opts),
            Method::NarrowBeam => design_narrow_beam(self.config, theta_t, &sl, &opts),
            Method::Cpa => design_cpa(self.config, theta_t, &sl, &opts),
        }
    }

    /// The convex program a beamwidth-constrained run would solve.
    pub fn sdp_problem(&self) -> Result<Option<SdpProblem>> {
        if self.method != Method::BeamwidthConstrained {
            return Ok(None);
        }
        let (ml, sl, opts) = (self.mainlobe()?, self.sidelobe()?, self.options());
        let rm = build_region_matrices(self.config, &ml, &sl, opts.nodes_per_degree)?;
        let lobes = lobe_constraints(&ml, opts.constraint_grid_step_deg)?;
        Ok(Some(if self.config.q == self.config.m {
            build_q_equals_m(&self.config, &rm, &lobes)?
        } else {
            build_sdr(&self.config, &rm, &lobes)?
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpaComparison {
    pub cpa_width_deg: Option<f64>,
    pub design_width_deg: Option<f64>,
    pub width_diff_deg: Option<f64>,
}

/// Contents of `<name>.result.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema: String,
    pub name: String,
    pub method: Method,
    pub config: ArrayConfig,
    pub mainlobes: Vec<(f64, f64)>,
    pub mainlobe_intervals_deg: Vec<(f64, f64)>,
    pub sidelobe_intervals_deg: Vec<(f64, f64)>,
    pub theta_t_deg: Option<f64>,
    pub c_real: Vec<f64>,
    pub c_imag: Vec<f64>,
    pub objective: f64,
    pub metrics: Metrics,
    pub closed_form: Option<ClosedFormInfo>,
    pub sdp: Option<SdpInfo>,
    pub randomization: Option<RandomizationReport>,
    pub cpa_comparison: Option<CpaComparison>,
    pub options: DesignOptions,
}

impl ResultFile {
    pub fn c(&self) -> CVector {
        CVector::from_iterator(
            self.c_real.len(),
            self.c_real
                .iter()
                .zip(&self.c_imag)
                .map(|(&re, &im)| C64::new(re, im)),
        )
    }

    /// Recomputes the ISL ratio from the stored coefficients and regions.
    pub fn reevaluate_objective(&self) -> Result<f64> {
        let ml = AngularRegion::from_lobes_deg(&self.mainlobes)?;
        let sl = ml.complement();
        let npd = self.options.nodes_per_degree;
        let rm = match self.method {
            Method::ClosedForm | Method::BeamwidthConstrained => {
                build_region_matrices(self.config, &ml, &sl, npd)?
            }
            Method::NarrowBeam | Method::Cpa => {
                let t = self.theta_t_deg.unwrap_or(0.0).to_radians();
                RegionMatrices::point_mainlobe(self.config, t, &sl, npd)?
            }
        };
        isl_ratio(&self.c(), &rm)
    }
}

pub struct ScenarioOutput {
    pub solution: CoefficientSolution,
    pub result: ResultFile,
    pub json_path: PathBuf,
    pub csv_path: PathBuf,
}

fn cpa_comparison(s: &Scenario, sol: &CoefficientSolution) -> Result<Option<CpaComparison>> {
    if s.method != Method::NarrowBeam {
        return Ok(None);
    }
    let theta_t = s.theta_t_deg.unwrap_or(0.0).to_radians();
    let cpa = design_cpa(s.config, theta_t, &s.sidelobe()?, &s.options())?;
    let (a, b) = (cpa.metrics.width_3db, sol.metrics.width_3db);
    Ok(Some(CpaComparison {
        cpa_width_deg: a,
        design_width_deg: b,
        width_diff_deg: a.zip(b).map(|(a, b)| (a - b).abs()),
    }))
}

/// Designs `s` and writes `<name>.result.json` and `<name>.beampattern.csv`
/// into `out_dir`.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<ScenarioOutput> {
    let solution = s.design()?;
    let ml = s.mainlobe()?;
    let result = ResultFile {
        schema: SCHEMA.to_string(),
        name: s.name.clone(),
        method: s.method,
        config: solution.config,
        mainlobes: s.mainlobes.clone(),
        mainlobe_intervals_deg: ml.to_degrees(),
        sidelobe_intervals_deg: ml.complement().to_degrees(),
        theta_t_deg: s.theta_t_deg,
        c_real: solution.c.iter().map(|z| z.re).collect(),
        c_imag: solution.c.iter().map(|z| z.im).collect(),
        objective: solution.objective,
        metrics: solution.metrics.clone(),
        closed_form: solution.closed_form.clone(),
        sdp: solution.sdp.clone(),
        randomization: solution.randomization.clone(),
        cpa_comparison: cpa_comparison(s, &solution)?,
        options: s.options(),
    };
    std::fs::create_dir_all(out_dir)?;
    let json_path = out_dir.join(format!("{}.result.json", s.name));
    let csv_path = out_dir.join(format!("{}.beampattern.csv", s.name));
    std::fs::write(&json_path, serde_json::to_string_pretty(&result)?)?;
    solution.beampattern.write_csv(&csv_path)?;
    Ok(ScenarioOutput {
        solution,
        result,
        json_path,
        csv_path,
    })
}

/// `sdp-dump v1` text of the scenario's convex program, if it has one.
pub fn dump_scenario_sdp(s: &Scenario) -> Result<Option<String>> {
    Ok(s.sdp_problem()?.map(|p| write_dump(&p)))
}
