use std::f64::consts::FRAC_2_PI;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use shafer_core::catalog::{BoundId, ShaferParam};
use shafer_core::oracle::{GridSpec, OracleTable, Precision};
use shafer_core::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Every catalogued bound.
    All,
    /// The parameter-free inequalities.
    Classical,
    /// The parameterised family and its corollaries.
    Family,
    /// Bounds known to be false; expected to fail.
    Errata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// An errata bound that failed, as expected.
    KnownErrata,
    /// An errata bound that unexpectedly held on the grid.
    ErrataNotReproduced,
}

impl Status {
    /// Errata bounds are verified for failure: a clean sweep is the surprise.
    pub fn of_sweep(is_errata: bool, sweep_passed: bool) -> Status {
        match (is_errata, sweep_passed) {
            (false, true) => Status::Pass,
            (false, false) => Status::Fail,
            (true, false) => Status::KnownErrata,
            (true, true) => Status::ErrataNotReproduced,
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::ErrataNotReproduced)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::KnownErrata => "known-errata",
            Status::ErrataNotReproduced => "errata-not-reproduced",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub bound: BoundId,
    pub a: Option<f64>,
    pub side: String,
    pub status: Status,
    pub violations: usize,
    pub min_margin: f64,
    pub min_margin_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub grid: GridSpec,
    pub precision_digits: u32,
    pub entries: Vec<VerifyEntry>,
    pub passed: bool,
}

const SHAFER_PARAMS: [f64; 4] = [0.0, 0.1, 0.25, 0.5];
const REVERSED_PARAMS: [f64; 4] = [FRAC_2_PI, 0.7, 1.0, 2.0];
const INTERIOR_PARAMS: [f64; 4] = [0.51, 0.55, 0.6, 0.63];

fn cases(suite: Suite) -> Vec<(BoundId, Option<f64>)> {
    use BoundId::*;
    let classical = [Shafer1, Kuang2Upper, Kuang2Lower, UpperX, LowerCubic, LogLower, LogUpper]
        .map(|id| (id, None));
    let mut family = Vec::new();
    for (ids, params) in [
        ([ShaferFamLower, ShaferFamUpper], SHAFER_PARAMS),
        ([RevFamLower, RevFamUpper], REVERSED_PARAMS),
        ([Eq9Lower, Eq9Upper], INTERIOR_PARAMS),
    ] {
        for a in params {
            family.extend(ids.map(|id| (id, Some(a))));
        }
    }
    family.push((Eq10CorrectedLower, None));
    family.push((Eq10Upper, None));
    let errata = [(Eq10PrintedLower, None)];

    match suite {
        Suite::All => classical.into_iter().chain(family).chain(errata).collect(),
        Suite::Classical => classical.to_vec(),
        Suite::Family => family,
        Suite::Errata => errata.to_vec(),
    }
}

/// Sweeps every bound in `suite` against one shared oracle table.
pub fn run_suite(suite: Suite, grid: GridSpec, precision: Precision) -> Result<VerifyReport> {
    let table = OracleTable::build(grid, precision)?;
    let mut entries = Vec::new();
    for (id, a) in cases(suite) {
        let report = table.sweep(id, a.map(ShaferParam), id.side())?;
        let status = Status::of_sweep(id.is_errata(), report.passed());
        entries.push(VerifyEntry {
            bound: id,
            a,
            side: id.side().to_string(),
            status,
            violations: report.violations.len(),
            min_margin: report.min_margin,
            min_margin_x: report.min_margin_x,
        });
    }
    let passed = !entries.iter().any(|e| e.status.is_failure());
    Ok(VerifyReport { suite, grid, precision_digits: precision.decimal_digits, entries, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_statuses() {
        assert!(!Status::of_sweep(false, true).is_failure());
        assert!(Status::of_sweep(false, false).is_failure());
        assert!(!Status::of_sweep(true, false).is_failure());
        assert!(Status::of_sweep(true, true).is_failure());
    }

    #[test]
    fn suites_partition_all() {
        let mut parts: Vec<_> = [Suite::Classical, Suite::Family, Suite::Errata].into_iter().flat_map(cases).collect();
        let mut all = cases(Suite::All);
        let key = |c: &(BoundId, Option<f64>)| (c.0 as u8, c.1.map(f64::to_bits));
        parts.sort_by_key(key);
        all.sort_by_key(key);
        assert_eq!(parts, all);
        assert_eq!(all.len(), 34);
        // every catalogued bound is covered
        assert!(BoundId::ALL.iter().all(|id| all.iter().any(|c| c.0 == *id)));
    }
}
