use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

pub const HALF_PI: f64 = FRAC_PI_2;

const EDGE_TOL: f64 = 1e-12;

/// Degrees to radians.
pub fn deg(d: f64) -> f64 {
    d.to_radians()
}

/// Disjoint union of closed angle intervals inside `[-π/2, π/2]` (radians).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AngularRegion {
    intervals: Vec<(f64, f64)>,
}

impl AngularRegion {
    /// Builds a region from `(lo, hi)` pairs in radians. Intervals are sorted;
    /// they may touch but not overlap.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for iv in intervals.iter_mut() {
            let (lo, hi) = *iv;
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Validation("interval bounds must be finite".into()));
            }
            if lo < -HALF_PI - EDGE_TOL || hi > HALF_PI + EDGE_TOL {
                return Err(Error::Validation(format!(
                    "interval [{:.4}°, {:.4}°] leaves [-90°, 90°]",
                    lo.to_degrees(),
                    hi.to_degrees()
                )));
            }
            if lo >= hi {
                return Err(Error::Validation(format!(
                    "interval [{:.4}°, {:.4}°] has non-positive width",
                    lo.to_degrees(),
                    hi.to_degrees()
                )));
            }
            *iv = (lo.max(-HALF_PI), hi.min(HALF_PI));
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::Validation(format!(
                    "intervals [{:.4}°, {:.4}°] and [{:.4}°, {:.4}°] overlap",
                    w[0].0.to_degrees(),
                    w[0].1.to_degrees(),
                    w[1].0.to_degrees(),
                    w[1].1.to_degrees()
                )));
            }
        }
        Ok(AngularRegion { intervals })
    }

    pub fn from_degrees(intervals: &[(f64, f64)]) -> Result<Self> {
        Self::new(intervals.iter().map(|&(a, b)| (deg(a), deg(b))).collect())
    }

    /// Lobes given as `(center, width)` in degrees.
    pub fn from_lobes_deg(lobes: &[(f64, f64)]) -> Result<Self> {
        let ivs: Vec<_> = lobes
            .iter()
            .map(|&(c, w)| (c - 0.5 * w, c + 0.5 * w))
            .collect();
        Self::from_degrees(&ivs)
    }

    pub fn empty() -> Self {
        AngularRegion::default()
    }

    pub fn full() -> Self {
        AngularRegion {
            intervals: vec![(-HALF_PI, HALF_PI)],
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn to_degrees(&self) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .map(|&(a, b)| (a.to_degrees(), b.to_degrees()))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total width in radians.
    pub fn width(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(a, b)| theta >= a - EDGE_TOL && theta <= b + EDGE_TOL)
    }

    /// True when the two regions share a set of positive measure.
    pub fn overlaps(&self, other: &AngularRegion) -> bool {
        self.intervals.iter().any(|&(a, b)| {
            other
                .intervals
                .iter()
                .any(|&(c, d)| a.max(c) < b.min(d) - EDGE_TOL)
        })
    }

    /// Complement inside `[-π/2, π/2]`.
    pub fn complement(&self) -> AngularRegion {
        let mut out = Vec::new();
        let mut cursor = -HALF_PI;
        for &(a, b) in &self.intervals {
            if a > cursor + EDGE_TOL {
                out.push((cursor, a));
            }
            cursor = cursor.max(b);
        }
        if cursor < HALF_PI - EDGE_TOL {
            out.push((cursor, HALF_PI));
        }
        AngularRegion { intervals: out }
    }

    /// True when `self ∪ other` covers `[-π/2, π/2]` up to edge tolerance.
    pub fn covers_span_with(&self, other: &AngularRegion) -> bool {
        let mut all: Vec<_> = self
            .intervals
            .iter()
            .chain(other.intervals.iter())
            .copied()
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cursor = -HALF_PI;
        for (a, b) in all {
            if a > cursor + 1e-9 {
                return false;
            }
            cursor = cursor.max(b);
        }
        cursor >= HALF_PI - 1e-9
    }

    /// Midpoint of each interval.
    pub fn centers(&self) -> Vec<f64> {
        self.intervals.iter().map(|(a, b)| 0.5 * (a + b)).collect()
    }
}
