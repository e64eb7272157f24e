use serde::{Deserialize, Serialize};

use super::{GridSpec, HighPrecision, Oracle, Precision};
use crate::catalog::{BoundId, ShaferParam, Side};
use crate::error::{BoundsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tighter {
    A,
    B,
    Equal,
}

/// A maximal run of consecutive grid points with the same verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub tighter: Tighter,
    pub x_start: f64,
    pub x_end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceConfig {
    /// Values within this relative distance count as equal. Zero compares exactly.
    pub rel_tol: f64,
    pub precision: Precision,
}

impl Default for DominanceConfig {
    fn default() -> Self {
        DominanceConfig { rel_tol: 1e-15, precision: Precision::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub id_a: BoundId,
    pub a_a: Option<ShaferParam>,
    pub id_b: BoundId,
    pub a_b: Option<ShaferParam>,
    pub side: Side,
    pub grid: GridSpec,
    pub rel_tol: f64,
    pub regions: Vec<Region>,
    /// Abscissae where the tighter bound switches between A and B.
    pub crossovers: Vec<f64>,
}

impl DominanceReport {
    /// True when A is strictly tighter at every grid point.
    pub fn a_everywhere(&self) -> bool {
        self.regions.iter().all(|r| r.tighter == Tighter::A)
    }

    pub fn count(&self, t: Tighter) -> usize {
        self.regions.iter().filter(|r| r.tighter == t).map(|r| r.points).sum()
    }
}

struct Comparator<'a> {
    oracle: &'a Oracle,
    id_a: BoundId,
    a_a: Option<ShaferParam>,
    id_b: BoundId,
    a_b: Option<ShaferParam>,
    side: Side,
    tol: HighPrecision,
}

impl Comparator<'_> {
    fn verdict(&self, x: f64) -> Result<Tighter> {
        let va = self.oracle.eval_bound(self.id_a, self.a_a, x)?;
        let vb = self.oracle.eval_bound(self.id_b, self.a_b, x)?;
        let diff = &va - &vb;
        let scale = va.abs().max(vb.abs());
        let band = scaled(&self.tol, &scale);
        if diff.abs() <= band {
            return Ok(Tighter::Equal);
        }
        let a_larger = diff.is_positive();
        Ok(match (self.side, a_larger) {
            (Side::Lower, true) | (Side::Upper, false) => Tighter::A,
            _ => Tighter::B,
        })
    }

    /// Bisects on `x` between two points with opposite strict verdicts.
    fn crossover(&self, mut lo: f64, mut hi: f64, lo_verdict: Tighter) -> Result<f64> {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.verdict(mid)? == lo_verdict {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

// tol * scale, both high precision.
fn scaled(tol: &HighPrecision, scale: &HighPrecision) -> HighPrecision {
    let digits = tol.digits();
    let s = scale.rescale(digits);
    let one = super::fixed::pow10(digits);
    HighPrecision::from_raw(tol.raw() * s.raw() / one, digits)
}

/// Partitions the grid by which of two same-side bounds is tighter.
pub fn dominance_report(
    id_a: BoundId,
    a_a: Option<ShaferParam>,
    id_b: BoundId,
    a_b: Option<ShaferParam>,
    grid: &GridSpec,
    cfg: &DominanceConfig,
) -> Result<DominanceReport> {
    grid.validate()?;
    if id_a.side() != id_b.side() {
        return Err(BoundsError::Side {
            reason: format!("{id_a} is a {} bound but {id_b} is a {} bound", id_a.side(), id_b.side()),
        });
    }
    if !(cfg.rel_tol >= 0.0 && cfg.rel_tol.is_finite()) {
        return Err(BoundsError::param(format!("rel_tol must be non-negative, got {}", cfg.rel_tol)));
    }
    id_a.check_param(a_a)?;
    id_b.check_param(a_b)?;
    let oracle = Oracle::new(cfg.precision)?;
    let cmp = Comparator {
        oracle: &oracle,
        id_a,
        a_a,
        id_b,
        a_b,
        side: id_a.side(),
        tol: HighPrecision::from_f64(cfg.rel_tol, oracle.digits()),
    };

    let xs = grid.abscissae();
    let mut regions: Vec<Region> = Vec::new();
    let mut crossovers = Vec::new();
    let mut last_strict: Option<(f64, Tighter)> = None;
    for &x in &xs {
        let v = cmp.verdict(x)?;
        match regions.last_mut() {
            Some(r) if r.tighter == v => {
                r.x_end = x;
                r.points += 1;
            }
            _ => regions.push(Region { tighter: v, x_start: x, x_end: x, points: 1 }),
        }
        if v != Tighter::Equal {
            if let Some((px, pv)) = last_strict {
                if pv != v {
                    crossovers.push(cmp.crossover(px, x, pv)?);
                }
            }
            last_strict = Some((x, v));
        }
    }
    Ok(DominanceReport {
        id_a,
        a_a,
        id_b,
        a_b,
        side: id_a.side(),
        grid: *grid,
        rel_tol: cfg.rel_tol,
        regions,
        crossovers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflexive_comparison_is_all_equal() {
        let grid = GridSpec::log(1e-3, 1e3, 50).unwrap();
        let r = dominance_report(BoundId::Shafer1, None, BoundId::Shafer1, None, &grid, &Default::default())
            .unwrap();
        assert_eq!(r.regions.len(), 1);
        assert_eq!(r.regions[0].tighter, Tighter::Equal);
        assert!(r.crossovers.is_empty());
    }

    #[test]
    fn mixed_sides_rejected() {
        let grid = GridSpec::log(1e-3, 1e3, 10).unwrap();
        let e = dominance_report(BoundId::Shafer1, None, BoundId::UpperX, None, &grid, &Default::default());
        assert!(matches!(e, Err(BoundsError::Side { .. })));
    }

    #[test]
    fn corrected_eq10_overtakes_shafer_once() {
        let grid = GridSpec::log(1e-4, 1e4, 200).unwrap();
        let r = dominance_report(
            BoundId::Eq10CorrectedLower,
            None,
            BoundId::Shafer1,
            None,
            &grid,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(r.crossovers.len(), 1);
        assert_eq!(r.regions.first().unwrap().tighter, Tighter::B);
        assert_eq!(r.regions.last().unwrap().tighter, Tighter::A);
    }
}
