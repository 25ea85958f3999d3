//! Tolerance-swept accuracy / completeness / F1 scoring of a
//! reconstruction against a ground-truth point cloud.
//!
//! Tolerances are given in centimeters (scene units are meters,
//! 1 cm = 0.01 m), matching the benchmark table layout.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::fusion::PointCloud;

/// Default tolerance sweep, in centimeters.
pub const DEFAULT_TOLERANCES_CM: [f64; 6] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0];

pub const METERS_PER_CM: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreRow {
    pub tau_cm: f64,
    pub accuracy: f64,
    pub completeness: f64,
    pub f1: f64,
}

impl ScoreRow {
    pub fn new(tau_cm: f64, accuracy: f64, completeness: f64) -> Self {
        let f1 = if accuracy + completeness == 0.0 {
            0.0
        } else {
            2.0 * accuracy * completeness / (accuracy + completeness)
        };
        Self {
            tau_cm,
            accuracy,
            completeness,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub scene: String,
    pub model: String,
    pub rows: Vec<ScoreRow>,
}

impl ScoreTable {
    /// CSV with header `tau_cm,accuracy,completeness,f1`, 4-decimal values.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau_cm,accuracy,completeness,f1\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{:.4},{:.4},{:.4},{:.4}\n",
                r.tau_cm, r.accuracy, r.completeness, r.f1
            ));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<ScoreTable> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if header.trim() != "tau_cm,accuracy,completeness,f1" {
            return Err(Error::format("<csv>", format!("unexpected header {header:?}")));
        }
        let mut rows = Vec::new();
        for (no, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<f64> = line
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::format("<csv>", format!("line {}: {e}", no + 2)))?;
            if parts.len() != 4 {
                return Err(Error::format("<csv>", format!("line {}: expected 4 fields", no + 2)));
            }
            rows.push(ScoreRow {
                tau_cm: parts[0],
                accuracy: parts[1],
                completeness: parts[2],
                f1: parts[3],
            });
        }
        Ok(ScoreTable {
            scene: String::new(),
            model: String::new(),
            rows,
        })
    }

    /// Aligned text table in the benchmark layout.
    pub fn to_text(&self) -> String {
        let mut s = format!("scene {} / model {}\n", self.scene, self.model);
        s.push_str(&format!(
            "{:>8} {:>10} {:>13} {:>8}\n",
            "tau (cm)", "accuracy", "completeness", "F1"
        ));
        for r in &self.rows {
            s.push_str(&format!(
                "{:>8} {:>10.4} {:>13.4} {:>8.4}\n",
                r.tau_cm, r.accuracy, r.completeness, r.f1
            ));
        }
        s
    }
}

/// Uniform-grid nearest-neighbor index, exact within `max_radius`.
struct GridIndex<'a> {
    points: &'a [Vector3<f64>],
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
    cell: f64,
}

impl<'a> GridIndex<'a> {
    fn build(points: &'a [Vector3<f64>], max_radius: f64) -> Self {
        let cell = max_radius.max(1e-12);
        let mut cells: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, cell)).or_default().push(i as u32);
        }
        Self {
            points,
            cells,
            cell,
        }
    }

    #[inline]
    fn key(p: &Vector3<f64>, cell: f64) -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    }

    /// Min squared distance to any point within `max_radius` of the query;
    /// may return larger values (or INFINITY) when none is that close.
    fn min_dist_sq(&self, q: &Vector3<f64>) -> f64 {
        let (kx, ky, kz) = Self::key(q, self.cell);
        let mut best = f64::INFINITY;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &i in ids {
                            let d = (self.points[i as usize] - q).norm_squared();
                            if d < best {
                                best = d;
                            }
                        }
                    }
                }
            }
        }
        best
    }
}

/// Fraction of `rec` points with a ground-truth point within tau (meters).
pub fn accuracy(rec: &PointCloud, gt: &PointCloud, tau_m: f64) -> Result<f64> {
    if gt.is_empty() {
        return Err(Error::invalid("accuracy needs a non-empty ground-truth cloud"));
    }
    if !(tau_m > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if rec.is_empty() {
        return Ok(0.0);
    }
    let index = GridIndex::build(&gt.points, tau_m);
    let t2 = tau_m * tau_m;
    let hits = rec.points.iter().filter(|p| index.min_dist_sq(p) <= t2).count();
    Ok(hits as f64 / rec.len() as f64)
}

/// Fraction of `gt` points with a reconstructed point within tau (meters).
pub fn completeness(rec: &PointCloud, gt: &PointCloud, tau_m: f64) -> Result<f64> {
    if gt.is_empty() {
        return Err(Error::invalid("completeness needs a non-empty ground-truth cloud"));
    }
    if !(tau_m > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if rec.is_empty() {
        return Ok(0.0);
    }
    accuracy(gt, rec, tau_m)
}

/// Scores `rec` against `gt` at every tolerance (centimeters, strictly
/// increasing). Nearest-neighbor queries run on a uniform grid with cell
/// size equal to the largest tolerance; results match brute force exactly.
pub fn evaluate(rec: &PointCloud, gt: &PointCloud, tolerances_cm: &[f64]) -> Result<ScoreTable> {
    if tolerances_cm.is_empty() {
        return Err(Error::invalid("need at least one tolerance"));
    }
    if tolerances_cm.windows(2).any(|w| w[0] >= w[1]) || tolerances_cm[0] <= 0.0 {
        return Err(Error::invalid("tolerances must be positive and strictly increasing"));
    }
    if gt.is_empty() {
        return Err(Error::invalid("evaluate needs a non-empty ground-truth cloud"));
    }
    let max_m = tolerances_cm.last().unwrap() * METERS_PER_CM;
    // One NN pass per side, then threshold per tolerance.
    let rec_d2: Vec<f64> = if rec.is_empty() {
        Vec::new()
    } else {
        let index = GridIndex::build(&gt.points, max_m);
        rec.points.iter().map(|p| index.min_dist_sq(p)).collect()
    };
    let gt_d2: Vec<f64> = if rec.is_empty() {
        Vec::new()
    } else {
        let index = GridIndex::build(&rec.points, max_m);
        gt.points.iter().map(|p| index.min_dist_sq(p)).collect()
    };
    let rows = tolerances_cm
        .iter()
        .map(|&tau_cm| {
            let t2 = (tau_cm * METERS_PER_CM) * (tau_cm * METERS_PER_CM);
            let acc = if rec.is_empty() {
                0.0
            } else {
                rec_d2.iter().filter(|d| **d <= t2).count() as f64 / rec.len() as f64
            };
            let comp = if rec.is_empty() {
                0.0
            } else {
                gt_d2.iter().filter(|d| **d <= t2).count() as f64 / gt.len() as f64
            };
            ScoreRow::new(tau_cm, acc, comp)
        })
        .collect();
    Ok(ScoreTable {
        scene: String::new(),
        model: String::new(),
        rows,
    })
}

/// Per-tolerance arithmetic mean of accuracy, completeness, and F1.
/// The aggregate F1 is the mean of the per-table F1s, not the harmonic
/// mean of the aggregated accuracy and completeness.
pub fn aggregate(tables: &[ScoreTable]) -> Result<ScoreTable> {
    let first = tables.first().ok_or_else(|| Error::invalid("aggregate of zero tables"))?;
    let taus: Vec<f64> = first.rows.iter().map(|r| r.tau_cm).collect();
    for t in tables {
        let other: Vec<f64> = t.rows.iter().map(|r| r.tau_cm).collect();
        if other != taus {
            return Err(Error::invalid("aggregate requires a shared tolerance list"));
        }
    }
    let n = tables.len() as f64;
    let rows = (0..taus.len())
        .map(|i| ScoreRow {
            tau_cm: taus[i],
            accuracy: tables.iter().map(|t| t.rows[i].accuracy).sum::<f64>() / n,
            completeness: tables.iter().map(|t| t.rows[i].completeness).sum::<f64>() / n,
            f1: tables.iter().map(|t| t.rows[i].f1).sum::<f64>() / n,
        })
        .collect();
    Ok(ScoreTable {
        scene: "aggregate".into(),
        model: first.model.clone(),
        rows,
    })
}

/// Per-tolerance metric deltas (variant minus base), in the same units
/// as the stored fractions, plus the mean delta across tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementReport {
    pub tau_cm: Vec<f64>,
    pub d_accuracy: Vec<f64>,
    pub d_completeness: Vec<f64>,
    pub d_f1: Vec<f64>,
    pub mean_d_accuracy: f64,
    pub mean_d_completeness: f64,
    pub mean_d_f1: f64,
}

pub fn improvement_report(base: &ScoreTable, variant: &ScoreTable) -> Result<ImprovementReport> {
    if base.rows.len() != variant.rows.len()
        || base
            .rows
            .iter()
            .zip(&variant.rows)
            .any(|(a, b)| a.tau_cm != b.tau_cm)
    {
        return Err(Error::invalid("improvement_report tolerance mismatch"));
    }
    let tau_cm: Vec<f64> = base.rows.iter().map(|r| r.tau_cm).collect();
    let d_accuracy: Vec<f64> = base
        .rows
        .iter()
        .zip(&variant.rows)
        .map(|(a, b)| b.accuracy - a.accuracy)
        .collect();
    let d_completeness: Vec<f64> = base
        .rows
        .iter()
        .zip(&variant.rows)
        .map(|(a, b)| b.completeness - a.completeness)
        .collect();
    let d_f1: Vec<f64> = base
        .rows
        .iter()
        .zip(&variant.rows)
        .map(|(a, b)| b.f1 - a.f1)
        .collect();
    let n = tau_cm.len() as f64;
    Ok(ImprovementReport {
        mean_d_accuracy: d_accuracy.iter().sum::<f64>() / n,
        mean_d_completeness: d_completeness.iter().sum::<f64>() / n,
        mean_d_f1: d_f1.iter().sum::<f64>() / n,
        tau_cm,
        d_accuracy,
        d_completeness,
        d_f1,
    })
}
