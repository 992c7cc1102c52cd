use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::scenario::Scenario;
use crate::array_model::{region_matrix, AngularRegion};
use crate::error::{Error, Result};
use crate::numerics::{herm_eig, numerical_rank, DEFAULT_RANK_TOL};
use crate::oracles::rel_diff;

pub const STUDY_CSV_HEADER: &str = "value,status,objective,psl_db,width_3db_deg,rank,monotone";

/// Relative tolerance for the constant-objective flag of a Q sweep.
pub const Q_SWEEP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    QSweep,
    MSweep,
    RankVsWidth,
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q_sweep" => Ok(StudyKind::QSweep),
            "m_sweep" => Ok(StudyKind::MSweep),
            "rank_vs_width" => Ok(StudyKind::RankVsWidth),
            other => Err(Error::Config(format!(
                "unknown study kind {other:?} (expected q_sweep, m_sweep or rank_vs_width)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub value: f64,
    /// `"ok"` or `"error: <message>"`.
    pub status: String,
    pub objective: Option<f64>,
    pub psl_db: Option<f64>,
    pub width_3db_deg: Option<f64>,
    pub rank: Option<usize>,
    /// Monotonicity (or constancy) relative to the preceding successful row.
    pub monotone: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyTable {
    pub kind: StudyKind,
    pub rows: Vec<StudyRow>,
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl StudyTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(STUDY_CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let status = r.status.replace([',', '\n'], ";");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.value,
                status,
                opt(r.objective.map(|v| format!("{v:.15e}"))),
                opt(r.psl_db.map(|v| format!("{v:.6}"))),
                opt(r.width_3db_deg.map(|v| format!("{v:.6}"))),
                opt(r.rank),
                opt(r.monotone),
            );
        }
        s
    }

    /// True when every row succeeded and every flag holds.
    pub fn all_monotone(&self) -> bool {
        self.rows.iter().all(|r| r.monotone == Some(true))
    }

    /// Smallest value whose rank equals `full`.
    pub fn first_full_rank(&self, full: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.rank == Some(full))
            .map(|r| r.value)
    }
}

/// Parses `"4,8,12"` or an inclusive range `"start:stop:step"`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let bad = || Error::Config(format!("cannot parse values {spec:?}"));
    let values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| start + k as f64 * step).collect()
    } else {
        spec.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

fn as_count(v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(Error::Validation(format!("{v} is not a positive integer")))
    }
}

fn error_row(value: f64, e: Error) -> StudyRow {
    StudyRow {
        value,
        status: format!("error: {e}"),
        objective: None,
        psl_db: None,
        width_3db_deg: None,
        rank: None,
        monotone: None,
    }
}

fn design_row(base: &Scenario, value: f64, kind: StudyKind) -> StudyRow {
    let run = || -> Result<StudyRow> {
        let mut s = base.clone();
        match kind {
            StudyKind::QSweep => s.config.q = as_count(value)?,
            StudyKind::MSweep => s.config.m = as_count(value)?,
            StudyKind::RankVsWidth => unreachable!("rank rows are not designs"),
        }
        let sol = s.design()?;
        Ok(StudyRow {
            value,
            status: "ok".into(),
            objective: Some(sol.objective),
            psl_db: sol.metrics.psl_db,
            width_3db_deg: sol.metrics.width_3db,
            rank: None,
            monotone: None,
        })
    };
    run().unwrap_or_else(|e| error_row(value, e))
}

fn rank_row(base: &Scenario, width: f64) -> StudyRow {
    let run = || -> Result<StudyRow> {
        let center = base.mainlobes.first().map_or(0.0, |l| l.0);
        let ml = AngularRegion::from_lobes_deg(&[(center, width)])?;
        let opts = base.options();
        let a = region_matrix(&ml, base.config.m, opts.nodes_per_degree)?;
        let rank = numerical_rank(&herm_eig(&a)?, DEFAULT_RANK_TOL) * base.config.q;
        Ok(StudyRow {
            value: width,
            status: "ok".into(),
            objective: None,
            psl_db: None,
            width_3db_deg: None,
            rank: Some(rank),
            monotone: None,
        })
    };
    run().unwrap_or_else(|e| error_row(width, e))
}

/// One row per value; rows that fail carry the error in `status`.
pub fn run_study(kind: StudyKind, base: &Scenario, values: &[f64]) -> Result<StudyTable> {
    if values.is_empty() {
        return Err(Error::Validation("study needs at least one value".into()));
    }
    let mut rows: Vec<StudyRow> = values
        .iter()
        .map(|&v| match kind {
            StudyKind::RankVsWidth => rank_row(base, v),
            _ => design_row(base, v, kind),
        })
        .collect();

    let first_obj = rows.iter().find_map(|r| r.objective);
    let mut prev_obj: Option<f64> = None;
    let mut prev_rank: Option<usize> = None;
    for r in rows.iter_mut().filter(|r| r.status == "ok") {
        r.monotone = Some(match kind {
            StudyKind::QSweep => {
                let (o, f) = (
                    r.objective.unwrap_or(f64::NAN),
                    first_obj.unwrap_or(f64::NAN),
                );
                rel_diff(o, f) <= Q_SWEEP_TOL
            }
            StudyKind::MSweep => {
                let o = r.objective.unwrap_or(f64::NAN);
                let ok = prev_obj.is_none_or(|p| o <= p * (1.0 + 1e-12));
                prev_obj = Some(o);
                ok
            }
            StudyKind::RankVsWidth => {
                let k = r.rank.unwrap_or(0);
                let ok = prev_rank.is_none_or(|p| k >= p);
                prev_rank = Some(k);
                ok
            }
        });
    }
    Ok(StudyTable { kind, rows })
}
