//! Fast `atan` with a certified error bound.
//!
//! For `x > 0` the kernel evaluates one family enclosure
//! `[c_lo t, c_hi t]` with `t = x / (a + sqrt(1+x^2))` and returns its
//! midpoint; the half-width is the certified error. One square root and one
//! division per call.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::catalog::ShaferParam;
use crate::error::{BoundsError, Result};
use crate::oracle::{GridSpec, HighPrecision, Oracle, Precision};

/// Baked switch point of the default kernel.
///
/// On every grid point the `a = 2/pi` enclosure is narrower than the
/// `a = 1/2` one (see `tune_crossover`), so the default switches at the
/// lower end of the default grid and uses `a_high` everywhere above it.
pub const DEFAULT_CROSSOVER: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    /// Used for `x < crossover`; must lie in `[0, 1/2]`.
    pub a_low: ShaferParam,
    /// Used for `x >= crossover`; must be at least `2/pi`.
    pub a_high: ShaferParam,
    pub crossover: f64,
}

impl KernelSpec {
    pub fn new(a_low: f64, a_high: f64, crossover: f64) -> Result<Self> {
        check_low(a_low)?;
        check_high(a_high)?;
        if !(crossover > 0.0 && crossover.is_finite()) {
            return Err(BoundsError::param(format!("crossover must be positive, got {crossover}")));
        }
        Ok(KernelSpec { a_low: ShaferParam(a_low), a_high: ShaferParam(a_high), crossover })
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec { a_low: ShaferParam(0.5), a_high: ShaferParam(FRAC_2_PI), crossover: DEFAULT_CROSSOVER }
    }
}

fn check_low(a: f64) -> Result<()> {
    if (0.0..=0.5).contains(&a) {
        Ok(())
    } else {
        Err(BoundsError::param(format!("a_low must lie in [0, 1/2], got {a}")))
    }
}

fn check_high(a: f64) -> Result<()> {
    if a >= FRAC_2_PI && a.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::param(format!("a_high must be at least 2/pi, got {a}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub x: f64,
    pub value: f64,
    /// Half-width of the enclosure the value was taken from.
    pub error_bound: f64,
}

// Midpoint and half-width coefficients of the enclosure at `a`:
// the bounds are (1+a) t and (pi/2) t in some order.
#[inline]
fn coefficients(a: f64) -> (f64, f64) {
    let c = 1.0 + a;
    (0.5 * (c + FRAC_PI_2), 0.5 * (c - FRAC_PI_2).abs())
}

#[inline]
fn half_width(a: f64, x: f64) -> f64 {
    let (_, w) = coefficients(a);
    w * x / (a + x.hypot(1.0))
}

/// Approximates `atan(x)` for finite `x`; non-finite input yields a NaN value
/// with an infinite error bound.
pub fn approx(spec: &KernelSpec, x: f64) -> CertifiedValue {
    if !x.is_finite() {
        return CertifiedValue { x, value: f64::NAN, error_bound: f64::INFINITY };
    }
    if x == 0.0 {
        return CertifiedValue { x, value: 0.0, error_bound: 0.0 };
    }
    let ax = x.abs();
    let a = if ax < spec.crossover { spec.a_low.0 } else { spec.a_high.0 };
    let s = if ax < 1e150 { (1.0 + ax * ax).sqrt() } else { ax };
    let t = ax / (a + s);
    let (mid, half) = coefficients(a);
    let value = mid * t;
    CertifiedValue { x, value: if x < 0.0 { -value } else { value }, error_bound: half * t }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub x: f64,
    pub value: f64,
    pub certified: f64,
    pub actual: f64,
    /// `certified / actual`; at least 1 wherever the certificate holds.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub spec: KernelSpec,
    pub grid: GridSpec,
    pub rows: Vec<ProfileRow>,
    pub max_actual: f64,
    pub max_certified: f64,
    /// Points where the actual error exceeded the certificate plus 2 ulp.
    pub uncertified: usize,
}

impl ErrorProfile {
    /// CSV with columns `x,value,certified,actual,ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| BoundsError::param(format!("csv write failed: {e}"));
        w.write_record(["x", "value", "certified", "actual", "ratio"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([r.x, r.value, r.certified, r.actual, r.ratio].map(|v| format!("{v:e}")))
                .map_err(io)?;
        }
        w.flush().map_err(|e| BoundsError::param(format!("csv flush failed: {e}")))?;
        Ok(())
    }
}

/// Distance from `v` to the next double away from zero.
pub fn ulp(v: f64) -> f64 {
    let m = v.abs();
    m.next_up() - m
}

/// Actual error of a kernel value against the oracle.
pub fn actual_error(oracle: &Oracle, cv: &CertifiedValue) -> Result<f64> {
    let truth = oracle.atan(cv.x)?;
    Ok((&HighPrecision::from_f64(cv.value, oracle.digits()) - &truth).abs().to_f64())
}

/// True when `actual <= certified` up to 2 ulp of the returned value.
pub fn is_certified(cv: &CertifiedValue, actual: f64) -> bool {
    actual <= cv.error_bound + 2.0 * ulp(cv.value)
}

/// Certified and actual error of the kernel on every grid point.
pub fn error_profile(spec: &KernelSpec, grid: &GridSpec, precision: Precision) -> Result<ErrorProfile> {
    grid.validate()?;
    let oracle = Oracle::new(precision)?;
    let mut rows = Vec::with_capacity(grid.points);
    let (mut max_actual, mut max_certified, mut uncertified) = (0.0f64, 0.0f64, 0usize);
    for x in grid.abscissae() {
        let cv = approx(spec, x);
        let actual = actual_error(&oracle, &cv)?;
        if !is_certified(&cv, actual) {
            uncertified += 1;
        }
        max_actual = max_actual.max(actual);
        max_certified = max_certified.max(cv.error_bound);
        let ratio = if actual > 0.0 { cv.error_bound / actual } else { f64::INFINITY };
        rows.push(ProfileRow { x, value: cv.value, certified: cv.error_bound, actual, ratio });
    }
    Ok(ErrorProfile { spec: *spec, grid: *grid, rows, max_actual, max_certified, uncertified })
}

/// Switch point between the `a_low` and `a_high` enclosures where their
/// half-widths cross, provided `a_low` is the narrower one below it.
///
/// Fails with `NoCrossing` when one enclosure is at least as narrow on every
/// grid point, and with `InvertedCrossing` when the widths cross but `a_high`
/// is the narrower one below the crossing.
pub fn tune_crossover(a_low: f64, a_high: f64, grid: &GridSpec) -> Result<f64> {
    check_low(a_low)?;
    check_high(a_high)?;
    grid.validate()?;
    let diff = |x: f64| half_width(a_low, x) - half_width(a_high, x);
    let xs = grid.abscissae();
    let mut prev: Option<(f64, f64)> = None;
    for &x in &xs {
        let d = diff(x);
        if d == 0.0 {
            continue;
        }
        if let Some((px, pd)) = prev {
            if (pd < 0.0) != (d < 0.0) {
                let (mut lo, mut hi) = (px, x);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if (diff(mid) < 0.0) == (pd < 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let at = 0.5 * (lo + hi);
                return if pd < 0.0 { Ok(at) } else { Err(BoundsError::InvertedCrossing { x: at }) };
            }
        }
        prev = Some((x, d));
    }
    let high_dominates = xs.iter().all(|&x| diff(x) >= 0.0);
    Err(BoundsError::NoCrossing { dominant: if high_dominates { a_high } else { a_low } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::enclosure;

    #[test]
    fn origin_and_symmetry() {
        let spec = KernelSpec::default();
        assert_eq!(approx(&spec, 0.0), CertifiedValue { x: 0.0, value: 0.0, error_bound: 0.0 });
        for &x in &[1e-9, 0.3, 1.0, 42.0, 1e7] {
            let p = approx(&spec, x);
            let n = approx(&spec, -x);
            assert_eq!(n.value, -p.value);
            assert_eq!(n.error_bound, p.error_bound);
        }
        assert!(approx(&spec, f64::NAN).value.is_nan());
    }

    #[test]
    fn low_branch_at_one_matches_enclosure() {
        let spec = KernelSpec::new(0.5, FRAC_2_PI, 2.0).unwrap();
        let cv = approx(&spec, 1.0);
        assert!((cv.value - 0.802_103_899_783_250_7).abs() < 1e-15);
        assert!((cv.error_bound - 0.018_492_274_892_026_35).abs() < 1e-15);
        let e = enclosure(ShaferParam(0.5), 1.0).unwrap();
        assert!((cv.value - e.midpoint()).abs() < 2e-16);
    }

    #[test]
    fn default_at_one_uses_high_branch() {
        let cv = approx(&KernelSpec::default(), 1.0);
        assert!((cv.value - 0.781_978_731_481_865_9).abs() < 1e-15);
        assert!((cv.error_bound - 0.016_047_975_341_937_76).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(KernelSpec::new(0.6, 1.0, 1.0).is_err());
        assert!(KernelSpec::new(0.5, 0.6, 1.0).is_err());
        assert!(KernelSpec::new(0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn tuning_outcomes() {
        let grid = GridSpec::default();
        assert!(matches!(
            tune_crossover(0.5, FRAC_2_PI, &grid),
            Err(BoundsError::NoCrossing { dominant }) if dominant == FRAC_2_PI
        ));
        assert!(matches!(tune_crossover(0.0, FRAC_2_PI, &grid), Err(BoundsError::NoCrossing { .. })));
        assert!(matches!(tune_crossover(0.5, 1.0, &grid), Err(BoundsError::NoCrossing { dominant }) if dominant == 0.5));
        let two = GridSpec::log(1.0, 2.0, 2).unwrap();
        assert!(matches!(tune_crossover(0.5, FRAC_2_PI, &two), Err(BoundsError::NoCrossing { .. })));
    }
}
