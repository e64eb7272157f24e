use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{HighPrecision, Oracle, Precision};
use crate::catalog::{BoundId, ShaferParam, Side};
use crate::error::{BoundsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

/// Sample points over `[x_min, x_max]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        let grid = GridSpec { x_min, x_max, points, spacing };
        grid.validate()?;
        Ok(grid)
    }

    pub fn log(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        Self::new(x_min, x_max, points, Spacing::Log)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(BoundsError::Grid { reason });
        if !(self.x_min > 0.0 && self.x_min.is_finite() && self.x_max.is_finite()) {
            return bad(format!("grid bounds must be positive and finite ({}, {})", self.x_min, self.x_max));
        }
        if !(self.x_min < self.x_max) {
            return bad(format!("x_min {} must be below x_max {}", self.x_min, self.x_max));
        }
        if self.points < 2 {
            return bad(format!("a grid needs at least 2 points, got {}", self.points));
        }
        Ok(())
    }

    pub fn abscissae(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        let mut xs: Vec<f64> = match self.spacing {
            Spacing::Log => {
                let (l0, l1) = (self.x_min.ln(), self.x_max.ln());
                (0..n).map(|i| (l0 + (l1 - l0) * i as f64 / last).exp()).collect()
            }
            Spacing::Linear => {
                (0..n).map(|i| self.x_min + (self.x_max - self.x_min) * i as f64 / last).collect()
            }
        };
        xs[0] = self.x_min;
        xs[n - 1] = self.x_max;
        xs
    }
}

impl Default for GridSpec {
    /// 10^4 log-spaced points over `[1e-8, 1e8]`.
    fn default() -> Self {
        GridSpec { x_min: 1e-8, x_max: 1e8, points: 10_000, spacing: Spacing::Log }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub bound: f64,
    pub oracle: f64,
    /// Signed slack on the claimed side: absolute for `x <= 1`, relative to
    /// `atan(x)` above. Positive means the bound holds.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: f64,
    pub bound_value: f64,
    pub oracle_value: f64,
}

/// Outcome of checking one bound against the oracle over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub bound_id: BoundId,
    pub a: Option<ShaferParam>,
    pub side: Side,
    pub grid: GridSpec,
    pub precision_digits: u32,
    pub violations: Vec<Violation>,
    pub min_margin: f64,
    pub min_margin_x: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    fn empty(bound_id: BoundId, a: Option<ShaferParam>, side: Side, grid: GridSpec, digits: u32) -> Self {
        SweepReport {
            bound_id,
            a,
            side,
            grid,
            precision_digits: digits,
            violations: Vec::new(),
            min_margin: f64::INFINITY,
            min_margin_x: f64::NAN,
            rows: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Combines partial sweeps of disjoint grid chunks. The result does not
    /// depend on the order or grouping of merges.
    pub fn merge(mut self, other: SweepReport) -> Result<SweepReport> {
        if self.bound_id != other.bound_id || self.a != other.a || self.side != other.side {
            return Err(BoundsError::param("cannot merge sweeps of different bounds"));
        }
        if other.min_margin < self.min_margin
            || (other.min_margin == self.min_margin && other.min_margin_x < self.min_margin_x)
        {
            self.min_margin = other.min_margin;
            self.min_margin_x = other.min_margin_x;
        }
        self.violations.extend(other.violations);
        self.violations.sort_by(|p, q| p.x.total_cmp(&q.x));
        self.rows.extend(other.rows);
        self.rows.sort_by(|p, q| p.x.total_cmp(&q.x));
        Ok(self)
    }

    /// CSV with columns `x,bound,oracle,margin`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| BoundsError::param(format!("csv write failed: {e}"));
        w.write_record(["x", "bound", "oracle", "margin"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([r.x, r.bound, r.oracle, r.margin].map(|v| format!("{v:e}"))).map_err(io)?;
        }
        w.flush().map_err(|e| BoundsError::param(format!("csv flush failed: {e}")))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep report serializes")
    }
}

/// Oracle values of `atan` on a grid, computed once and shared by every
/// bound checked against that grid.
#[derive(Debug, Clone)]
pub struct OracleTable {
    grid: GridSpec,
    xs: Vec<f64>,
    values: Vec<HighPrecision>,
    oracle: Oracle,
}

impl OracleTable {
    pub fn build(grid: GridSpec, precision: Precision) -> Result<Self> {
        grid.validate()?;
        let oracle = Oracle::new(precision)?;
        let xs = grid.abscissae();
        let values = xs.iter().map(|&x| oracle.atan(x)).collect::<Result<Vec<_>>>()?;
        Ok(OracleTable { grid, xs, values, oracle })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[HighPrecision] {
        &self.values
    }

    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }

    /// Checks the bound on the grid points in `range` only.
    pub fn sweep_range(
        &self,
        id: BoundId,
        a: Option<ShaferParam>,
        side: Side,
        range: Range<usize>,
    ) -> Result<SweepReport> {
        id.check_param(a)?;
        let mut report = SweepReport::empty(id, a, side, self.grid, self.oracle.digits());
        for i in range {
            let x = self.xs[i];
            let truth = &self.values[i];
            let bound = self.oracle.eval_bound(id, a, x)?;
            let slack = match side {
                Side::Lower => truth - &bound,
                Side::Upper => &bound - truth,
            };
            let margin = if x > 1.0 { slack.to_f64() / truth.to_f64() } else { slack.to_f64() };
            if !slack.is_positive() {
                report.violations.push(Violation { x, bound_value: bound.to_f64(), oracle_value: truth.to_f64() });
            }
            if margin < report.min_margin {
                report.min_margin = margin;
                report.min_margin_x = x;
            }
            report.rows.push(SweepRow { x, bound: bound.to_f64(), oracle: truth.to_f64(), margin });
        }
        Ok(report)
    }

    /// Full-grid sweep, evaluated in chunks and merged.
    pub fn sweep(&self, id: BoundId, a: Option<ShaferParam>, side: Side) -> Result<SweepReport> {
        const CHUNK: usize = 1024;
        let n = self.xs.len();
        let mut report = self.sweep_range(id, a, side, 0..CHUNK.min(n))?;
        let mut start = CHUNK;
        while start < n {
            let part = self.sweep_range(id, a, side, start..(start + CHUNK).min(n))?;
            report = report.merge(part)?;
            start += CHUNK;
        }
        Ok(report)
    }
}

/// Builds an oracle table at the default sweep precision and checks one bound.
pub fn sweep(id: BoundId, a: Option<ShaferParam>, grid: &GridSpec, side: Side) -> Result<SweepReport> {
    OracleTable::build(*grid, Precision::default())?.sweep(id, a, side)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::log(1.0, 1.0, 10).is_err());
        assert!(GridSpec::log(0.0, 1.0, 10).is_err());
        assert!(GridSpec::log(1.0, 2.0, 1).is_err());
        let g = GridSpec::new(1.0, 3.0, 3, Spacing::Linear).unwrap();
        assert_eq!(g.abscissae(), vec![1.0, 2.0, 3.0]);
        let xs = GridSpec::default().abscissae();
        assert_eq!(xs.len(), 10_000);
        assert_eq!((xs[0], xs[9_999]), (1e-8, 1e8));
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn small_sweeps() {
        let grid = GridSpec::log(1e-6, 1e6, 200).unwrap();
        let table = OracleTable::build(grid, Precision::new(50).unwrap()).unwrap();

        let shafer = table.sweep(BoundId::Shafer1, None, Side::Lower).unwrap();
        assert!(shafer.passed() && shafer.min_margin > 0.0);
        assert_eq!(shafer.rows.len(), 200);

        let upper_x = table.sweep(BoundId::UpperX, None, Side::Upper).unwrap();
        assert!(upper_x.passed());

        let printed = table.sweep(BoundId::Eq10PrintedLower, None, Side::Lower).unwrap();
        assert!(!printed.passed() && printed.min_margin < 0.0);

        // Checking a lower bound as if it were an upper bound fails everywhere.
        let flipped = table.sweep(BoundId::Shafer1, None, Side::Upper).unwrap();
        assert_eq!(flipped.violations.len(), 200);
    }

    #[test]
    fn merge_rejects_mismatched_reports() {
        let grid = GridSpec::log(0.5, 2.0, 4).unwrap();
        let table = OracleTable::build(grid, Precision::new(30).unwrap()).unwrap();
        let a = table.sweep(BoundId::Shafer1, None, Side::Lower).unwrap();
        let b = table.sweep(BoundId::UpperX, None, Side::Upper).unwrap();
        assert!(a.merge(b).is_err());
    }

    #[test]
    fn csv_columns() {
        let grid = GridSpec::log(0.5, 2.0, 3).unwrap();
        let table = OracleTable::build(grid, Precision::new(30).unwrap()).unwrap();
        let r = table.sweep(BoundId::Kuang2Upper, None, Side::Upper).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,bound,oracle,margin"));
        assert_eq!(lines.count(), 3);
    }
}
