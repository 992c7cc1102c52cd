use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use super::{AngularRegion, ArrayConfig, RegionMatrices, HALF_PI};
use crate::error::{Error, Result};
use crate::numerics::{CVector, C64};
use crate::quadrature::{CompositeRule, PANEL_ORDER};

pub const CSV_HEADER: &str = "theta_deg,power,power_db_norm";

/// Normalized dB values are clamped here so nulls stay finite in CSV output.
const DB_FLOOR_RATIO: f64 = 1e-40;

/// Steering vector `a(θ)_m = exp(jπ m sin θ)`, `m = 0..M-1`.
pub fn steering(theta: f64, m: usize) -> Result<CVector> {
    if !(theta.abs() <= HALF_PI + 1e-12) {
        return Err(Error::Validation(format!(
            "steering angle {:.6}° outside [-90°, 90°]",
            theta.to_degrees()
        )));
    }
    if m == 0 {
        return Err(Error::Validation("antenna count must be >= 1".into()));
    }
    let step = C64::from_polar(1.0, PI * theta.sin());
    let mut out = CVector::zeros(m);
    let mut ph = C64::new(1.0, 0.0);
    for k in 0..m {
        out[k] = ph;
        ph *= step;
    }
    Ok(out)
}

/// `Σ_q |a^H(θ) c_q|²` with `c` unstacked column-major into `M × Q`.
fn power_at(c: &CVector, m: usize, q: usize, theta: f64) -> f64 {
    let step = C64::from_polar(1.0, -PI * theta.sin());
    let mut total = 0.0;
    for col in 0..q {
        let mut acc = C64::new(0.0, 0.0);
        let mut ph = C64::new(1.0, 0.0);
        for k in 0..m {
            acc += ph * c[col * m + k];
            ph *= step;
        }
        total += acc.norm_sqr();
    }
    total
}

fn check_len(c: &CVector, config: &ArrayConfig) -> Result<()> {
    if c.len() != config.dim() {
        return Err(Error::Validation(format!(
            "coefficient vector has length {}, expected M·Q = {}",
            c.len(),
            config.dim()
        )));
    }
    Ok(())
}

/// Beampattern sampled on an angle grid (radians).
#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternSamples {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl BeampatternSamples {
    /// Grid from -90° to 90° in `step_deg` increments; 90° is always included.
    pub fn uniform_grid(step_deg: f64) -> Result<Vec<f64>> {
        if !(step_deg > 0.0 && step_deg <= 180.0) {
            return Err(Error::Validation(format!(
                "grid step must be in (0, 180] degrees, got {step_deg}"
            )));
        }
        let n = (180.0 / step_deg + 1e-9).floor() as usize;
        let mut grid: Vec<f64> = (0..=n)
            .map(|k| (-90.0 + k as f64 * step_deg).to_radians())
            .collect();
        if grid.last().is_none_or(|&g| g < HALF_PI - 1e-10) {
            grid.push(HALF_PI);
        } else if let Some(g) = grid.last_mut() {
            *g = HALF_PI;
        }
        Ok(grid)
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let peak = self.peak();
        let mut s = String::with_capacity(48 * self.grid.len());
        s.push_str(CSV_HEADER);
        s.push('\n');
        for (&t, &p) in self.grid.iter().zip(&self.values) {
            let ratio = if peak > 0.0 {
                (p / peak).max(DB_FLOOR_RATIO)
            } else {
                DB_FLOOR_RATIO
            };
            let _ = writeln!(
                s,
                "{:.4},{:.12e},{:.6}",
                t.to_degrees(),
                p,
                10.0 * ratio.log10()
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

pub fn beampattern(c: &CVector, config: &ArrayConfig, grid: &[f64]) -> Result<BeampatternSamples> {
    check_len(c, config)?;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(
            "beampattern grid must be strictly increasing".into(),
        ));
    }
    if grid.iter().any(|t| t.abs() > HALF_PI + 1e-12) {
        return Err(Error::Validation(
            "beampattern grid leaves [-90°, 90°]".into(),
        ));
    }
    let values = grid
        .iter()
        .map(|&t| power_at(c, config.m, config.q, t))
        .collect();
    Ok(BeampatternSamples {
        grid: grid.to_vec(),
        values,
    })
}

/// `(c^H A_sl c) / (c^H A_ml c)`.
pub fn isl_ratio(c: &CVector, rm: &RegionMatrices) -> Result<f64> {
    check_len(c, &rm.config)?;
    let num = rm.a_sl.quad_form(c);
    let den = rm.a_ml.quad_form(c);
    let floor = 1e-14 * c.norm_squared() * rm.a_ml.frobenius_norm();
    if !(den > floor) {
        return Err(Error::NoMainlobeEnergy { energy: den });
    }
    Ok(num.max(0.0) / den)
}

/// Half-power crossing angles (degrees) around the peak inside `lobe_hint`.
pub fn half_power_edges(
    samples: &BeampatternSamples,
    lobe_hint: &AngularRegion,
) -> Result<(f64, f64)> {
    let (g, v) = (&samples.grid, &samples.values);
    let peak_idx = (0..g.len())
        .filter(|&i| lobe_hint.contains(g[i]))
        .max_by(|&a, &b| v[a].total_cmp(&v[b]).then(b.cmp(&a)))
        .ok_or_else(|| Error::Validation("no grid point inside the lobe hint".into()))?;
    let half = 0.5 * v[peak_idx];
    if !(half > 0.0) {
        return Err(Error::Validation("beampattern peak is zero".into()));
    }

    let mut i = peak_idx;
    while i > 0 && v[i - 1] > half {
        i -= 1;
    }
    if i == 0 {
        return Err(Error::UnboundedLobe { side: "left" });
    }
    let t = (v[i] - half) / (v[i] - v[i - 1]);
    let left = g[i] - t * (g[i] - g[i - 1]);

    let mut j = peak_idx;
    while j + 1 < g.len() && v[j + 1] > half {
        j += 1;
    }
    if j + 1 == g.len() {
        return Err(Error::UnboundedLobe { side: "right" });
    }
    let t = (v[j] - half) / (v[j] - v[j + 1]);
    let right = g[j] + t * (g[j + 1] - g[j]);

    Ok((left.to_degrees(), right.to_degrees()))
}

/// 3dB beamwidth in degrees of the lobe peaking inside `lobe_hint`.
pub fn measure_3db_width(samples: &BeampatternSamples, lobe_hint: &AngularRegion) -> Result<f64> {
    let (l, r) = half_power_edges(samples, lobe_hint)?;
    Ok(r - l)
}

/// Peak sidelobe level in dB relative to the global peak.
pub fn psl_db(samples: &BeampatternSamples, sidelobe: &AngularRegion) -> Result<f64> {
    let peak = samples.peak();
    if !(peak > 0.0) {
        return Err(Error::Validation("beampattern peak is zero".into()));
    }
    let side = samples
        .grid
        .iter()
        .zip(&samples.values)
        .filter(|(t, _)| sidelobe.contains(**t))
        .map(|(_, &p)| p)
        .fold(None, |acc: Option<f64>, p| {
            Some(acc.map_or(p, |a| a.max(p)))
        })
        .ok_or_else(|| Error::Validation("no grid point inside the sidelobe region".into()))?;
    Ok(10.0 * (side.max(DB_FLOOR_RATIO * peak) / peak).log10())
}

/// `∫ P(θ) cos θ dθ` over `[-90°, 90°]`; equals `2‖c‖²`.
pub fn radiated_energy(c: &CVector, config: &ArrayConfig) -> Result<f64> {
    check_len(c, config)?;
    let panels = 16 + (PI * config.m as f64).ceil() as usize;
    let rule = CompositeRule::new(-HALF_PI, HALF_PI, panels, PANEL_ORDER);
    Ok(rule.integrate(|t| power_at(c, config.m, config.q, t) * t.cos()))
}
