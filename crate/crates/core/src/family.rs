//! The family `f_a(x) = (a + sqrt(1+x^2)) atan(x) / x` and the machinery
//! behind its monotonicity: the derivative factor `g_a`, the quadratic factor
//! `h_a` of `g_a'`, its zero curves `a1`, `a2`, and the interior-minimum solver.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use serde::{Deserialize, Serialize};

use crate::catalog::{hyp, ShaferParam};
use crate::error::{require_positive, BoundsError, Result};

/// `f_a(x)`.
pub fn f(a: ShaferParam, x: f64) -> Result<f64> {
    require_positive(x)?;
    Ok((a.0 + hyp(x)) * x.atan() / x)
}

/// Continuous extension of `f_a` at the origin.
pub fn f_limit_zero(a: ShaferParam) -> f64 {
    1.0 + a.0
}

/// Limit of `f_a` as `x -> inf`, independent of `a`.
pub fn f_limit_infinity() -> f64 {
    FRAC_PI_2
}

fn one_plus_as(a: f64, x: f64, s: f64) -> Result<f64> {
    let d = 1.0 + a * s;
    if d.abs() <= 4.0 * f64::EPSILON * (1.0 + (a * s).abs()) {
        Err(BoundsError::Singularity { a, x })
    } else {
        Ok(d)
    }
}

/// `g_a(x) = (x + x^3 + a x sqrt(1+x^2)) / ((1+x^2)(1 + a sqrt(1+x^2))) - atan(x)`.
///
/// Evaluated as `x (s + a) / (s (1 + a s)) - atan(x)` with `s = sqrt(1+x^2)`,
/// which is the same rational function without the `x^3` overflow.
pub fn g(a: ShaferParam, x: f64) -> Result<f64> {
    require_positive(x)?;
    let a = a.0;
    let s = hyp(x);
    let d = one_plus_as(a, x, s)?;
    Ok(x * (s + a) / (s * d) - x.atan())
}

/// Limit of `g_a` at infinity, `1/a - pi/2`.
pub fn g_limit_infinity(a: ShaferParam) -> f64 {
    1.0 / a.0 - FRAC_PI_2
}

/// `f_a'(x) = (1 + a s) / (x^2 s) * g_a(x)`.
pub fn f_prime(a: ShaferParam, x: f64) -> Result<f64> {
    let gv = g(a, x)?;
    let s = hyp(x);
    Ok((1.0 + a.0 * s) / (x * x * s) * gv)
}

/// `g_a'(x) = -x^2 h_a(x) / ((1+x^2)^(3/2) (a s + 1)^2)`.
pub fn g_prime(a: ShaferParam, x: f64) -> Result<f64> {
    require_positive(x)?;
    let s = hyp(x);
    let d = one_plus_as(a.0, x, s)?;
    let hv = h(a, x)?;
    // x^2 / s^3 computed as (x/s)^2 / s to stay finite for large x.
    let r = x / s;
    Ok(-r * r / s * hv / (d * d))
}

/// `h_a(x) = 2 a^2 sqrt(1+x^2) + a - sqrt(1+x^2)`.
pub fn h(a: ShaferParam, x: f64) -> Result<f64> {
    require_positive(x)?;
    let a = a.0;
    let s = hyp(x);
    Ok(2.0 * a * a * s + a - s)
}

// sqrt(9 + 8x^2)
fn root9(x: f64) -> f64 {
    3.0f64.hypot(8.0f64.sqrt() * x)
}

/// Negative zero of `h_a(x)` viewed as a quadratic in `a`.
pub fn a1(x: f64) -> Result<f64> {
    require_positive(x)?;
    Ok(-(1.0 + root9(x)) / (4.0 * hyp(x)))
}

/// Positive zero of `h_a(x)` viewed as a quadratic in `a`.
pub fn a2(x: f64) -> Result<f64> {
    require_positive(x)?;
    Ok((root9(x) - 1.0) / (4.0 * hyp(x)))
}

pub fn a1_prime(x: f64) -> Result<f64> {
    require_positive(x)?;
    let s = hyp(x);
    let r = root9(x);
    Ok((x / s) / (s * s) * (1.0 + r) / (4.0 * r))
}

pub fn a2_prime(x: f64) -> Result<f64> {
    require_positive(x)?;
    let s = hyp(x);
    let r = root9(x);
    Ok((x / s) / (s * s) * (r - 1.0) / (4.0 * r))
}

/// Derivative of `F(x) = atan(x) - 3x / (1 + 2 sqrt(1+x^2))`:
/// `(sqrt(1+x^2) - 1)^2 / ((1+x^2)(1 + 2 sqrt(1+x^2))^2)`.
pub fn grinstein_derivative(x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(BoundsError::Domain { what: "x must be non-negative and finite", value: x });
    }
    let s = hyp(x);
    // (s - 1) / s = (x / s) * (x / (s + 1)), free of cancellation near 0.
    let t = (x / s) * (x / (s + 1.0));
    let d = 1.0 + 2.0 * s;
    Ok(t * t / (d * d))
}

/// `F(x) = atan(x) - 3x / (1 + 2 sqrt(1+x^2))`, the gap in the basic Shafer inequality.
pub fn grinstein_gap(x: f64) -> f64 {
    x.atan() - 3.0 * x / (1.0 + 2.0 * hyp(x))
}

/// Bracketing and bisection settings for [`find_minimum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Bound on `|g_a(x0)|` at termination.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub bracket_growth: f64,
}

impl SolverConfig {
    pub fn new(tolerance: f64, max_iterations: usize, bracket_growth: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(BoundsError::param(format!("tolerance must be positive, got {tolerance}")));
        }
        if max_iterations == 0 {
            return Err(BoundsError::param("max_iterations must be at least 1"));
        }
        if !(bracket_growth > 1.0 && bracket_growth.is_finite()) {
            return Err(BoundsError::param(format!("bracket_growth must exceed 1, got {bracket_growth}")));
        }
        Ok(SolverConfig { tolerance, max_iterations, bracket_growth })
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tolerance: 1e-12, max_iterations: 200, bracket_growth: 2.0 }
    }
}

/// Interior minimum of `f_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimumResult {
    pub x0: f64,
    pub value: f64,
    /// `sqrt(1 + x0^2)`.
    pub u: f64,
    /// `|g_a(x0)|` at termination.
    pub residual: f64,
    pub iterations: usize,
}

/// Locates the unique minimum of `f_a` for `1/2 < a < 2/pi` as the sign
/// change of `g_a`: negative below the minimum point, positive above it.
pub fn find_minimum(a: ShaferParam, cfg: &SolverConfig) -> Result<MinimumResult> {
    let av = a.0;
    if !(av > 0.5 && av < FRAC_2_PI) {
        return Err(BoundsError::param(format!(
            "f_a has an interior minimum only for 1/2 < a < 2/pi, got a = {av}"
        )));
    }
    let finish = |x0: f64, residual: f64, iterations: usize| -> Result<MinimumResult> {
        Ok(MinimumResult { x0, value: f(a, x0)?, u: hyp(x0), residual, iterations })
    };

    let mut lo = 1.0;
    let mut hi = 1.0;
    let g1 = g(a, 1.0)?;
    if g1 == 0.0 {
        return finish(1.0, 0.0, 0);
    }
    let mut steps = 0;
    if g1 < 0.0 {
        loop {
            if steps >= cfg.max_iterations {
                return Err(BoundsError::Bracket { a: av, steps });
            }
            steps += 1;
            lo = hi;
            hi *= cfg.bracket_growth;
            if g(a, hi)? > 0.0 {
                break;
            }
        }
    } else {
        loop {
            if steps >= cfg.max_iterations {
                return Err(BoundsError::Bracket { a: av, steps });
            }
            steps += 1;
            hi = lo;
            lo /= cfg.bracket_growth;
            if g(a, lo)? < 0.0 {
                break;
            }
        }
    }

    let mut residual = f64::INFINITY;
    for it in 1..=cfg.max_iterations {
        let mid = 0.5 * (lo + hi);
        let gm = g(a, mid)?;
        residual = gm.abs();
        if residual <= cfg.tolerance {
            return finish(mid, residual, it);
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(BoundsError::Convergence { a: av, iterations: cfg.max_iterations, residual })
}

/// Value of `f_a` at a critical point written through `u = sqrt(1 + x0^2)`:
/// `(a + u)^2 / (u (1 + a u))`.
pub fn min_value_closed_form(a: ShaferParam, u: f64) -> Result<f64> {
    if !(u > 1.0 && u.is_finite()) {
        return Err(BoundsError::Domain { what: "u must exceed 1", value: u });
    }
    let av = a.0;
    if !(av > 0.5 && av < FRAC_2_PI) {
        return Err(BoundsError::param(format!("closed form needs 1/2 < a < 2/pi, got a = {av}")));
    }
    Ok((av + u) * (av + u) / (u * (1.0 + av * u)))
}

/// Lower bound `4a(1 - a^2)` on the minimum value.
pub fn min_value_lower_bound(a: ShaferParam) -> f64 {
    4.0 * a.0 * (1.0 - a.0 * a.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn p(a: f64) -> ShaferParam {
        ShaferParam(a)
    }

    #[test]
    fn f_values_and_limits() {
        assert!((f(p(0.0), 1.0).unwrap() - SQRT_2 * PI / 4.0).abs() < 1e-15);
        assert!((f(p(0.3), 1e-9).unwrap() - 1.3).abs() < 1e-15);
        assert!((f(p(0.3), 1e12).unwrap() - FRAC_PI_2).abs() < 1e-11);
        assert!(f(p(0.3), 0.0).is_err());
    }

    #[test]
    fn g_examples() {
        assert!((g(p(2.0), 1e12).unwrap() - (0.5 - FRAC_PI_2)).abs() < 1e-11);
        assert!(g(p(0.6), 1e-9).unwrap().abs() < 1e-15);
        assert!(g(p(0.6), 0.5).unwrap() < 0.0);
        assert!(g(p(0.6), 0.0).is_err());
    }

    #[test]
    fn g_singularity_signalled() {
        // 1 + a s = 0 at s = 2, i.e. x = sqrt(3), for a = -1/2.
        let x = 3.0f64.sqrt();
        let s = hyp(x);
        let a = -1.0 / s;
        assert!(matches!(g(p(a), x), Err(BoundsError::Singularity { .. })));
    }

    #[test]
    fn h_examples() {
        assert!((h(p(1.0), 1.0).unwrap() - (1.0 + SQRT_2)).abs() < 1e-15);
        assert!((h(p(0.0), 1.0).unwrap() + SQRT_2).abs() < 1e-15);
        for &x in &[1e-3, 0.5, 2.0, 40.0] {
            assert!(h(p(a2(x).unwrap()), x).unwrap().abs() < 1e-13);
            assert!(h(p(a1(x).unwrap()), x).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn zero_curve_values_and_limits() {
        assert!((a2(1.0).unwrap() - 0.552_092_291_559_025_7).abs() < 1e-15);
        assert!((a1(1e-9).unwrap() + 1.0).abs() < 1e-15);
        assert!((a2(1e-9).unwrap() - 0.5).abs() < 1e-15);
        assert!((a1(1e12).unwrap() + FRAC_1_SQRT_2).abs() < 1e-11);
        assert!((a2(1e12).unwrap() - FRAC_1_SQRT_2).abs() < 1e-11);
        assert!(a1(0.0).is_err() && a2(-1.0).is_err());
    }

    #[test]
    fn zero_curve_derivatives_match_differences() {
        for &x in &[0.01, 0.3, 1.0, 5.0, 80.0] {
            let step = 1e-4 * x;
            let d1 = (a1(x + step).unwrap() - a1(x - step).unwrap()) / (2.0 * step);
            let d2 = (a2(x + step).unwrap() - a2(x - step).unwrap()) / (2.0 * step);
            let e1 = a1_prime(x).unwrap();
            let e2 = a2_prime(x).unwrap();
            assert!(e1 > 0.0 && e2 > 0.0);
            assert!((d1 - e1).abs() <= 1e-6 * e1.abs(), "a1' at {x}: {d1} vs {e1}");
            assert!((d2 - e2).abs() <= 1e-6 * e2.abs(), "a2' at {x}: {d2} vs {e2}");
        }
    }

    #[test]
    fn derivative_formulas_match_differences() {
        for &a in &[-3.0, 0.3, 0.6, 1.5] {
            for &x in &[0.2, 1.0, 3.0, 20.0] {
                let step = 1e-5 * x;
                let fd = (f(p(a), x + step).unwrap() - f(p(a), x - step).unwrap()) / (2.0 * step);
                let fp = f_prime(p(a), x).unwrap();
                assert!((fd - fp).abs() <= 1e-7 * fp.abs().max(1e-6), "f' a={a} x={x}: {fd} vs {fp}");
                let gd = (g(p(a), x + step).unwrap() - g(p(a), x - step).unwrap()) / (2.0 * step);
                let gp = g_prime(p(a), x).unwrap();
                assert!((gd - gp).abs() <= 1e-7 * gp.abs().max(1e-6), "g' a={a} x={x}: {gd} vs {gp}");
            }
        }
    }

    #[test]
    fn grinstein_values() {
        assert_eq!(grinstein_derivative(0.0).unwrap(), 0.0);
        assert!((grinstein_derivative(1.0).unwrap() - 0.005_852_991_110_277_026).abs() < 1e-17);
        assert!(grinstein_derivative(1e-4).unwrap() > 0.0);
        assert!(grinstein_derivative(-1.0).is_err());
    }

    #[test]
    fn find_minimum_examples() {
        let cfg = SolverConfig::default();
        let r = find_minimum(p(0.6), &cfg).unwrap();
        assert!(r.residual <= 1e-12);
        assert!(r.value > 1.536 && r.value < FRAC_PI_2);
        assert!((r.value - 1.565_389_253_248_792_2).abs() < 1e-11);
        assert!((r.x0 - 4.665_401_966_078_83).abs() < 1e-6);

        // g(0.51, 1) > 0, so the bracket is found by shrinking.
        let r = find_minimum(p(0.51), &cfg).unwrap();
        assert!(r.value > min_value_lower_bound(p(0.51)));
        assert!((r.x0 - 0.477_176_756_371_757_2).abs() < 1e-6);

        assert!(matches!(find_minimum(p(0.4), &cfg), Err(BoundsError::Param { .. })));
        assert!(matches!(find_minimum(p(FRAC_2_PI), &cfg), Err(BoundsError::Param { .. })));
        assert!(matches!(find_minimum(p(-0.5), &cfg), Err(BoundsError::Param { .. })));
    }

    #[test]
    fn find_minimum_budget_errors() {
        let tight = SolverConfig::new(1e-300, 5, 2.0).unwrap();
        assert!(matches!(find_minimum(p(0.6), &tight), Err(BoundsError::Convergence { .. })));
        // a = 0.63 has its minimum near x = 28; one doubling step cannot reach it.
        let short = SolverConfig::new(1e-12, 1, 2.0).unwrap();
        assert!(matches!(find_minimum(p(0.63), &short), Err(BoundsError::Bracket { .. })));
        assert!(SolverConfig::new(0.0, 10, 2.0).is_err());
        assert!(SolverConfig::new(1e-12, 0, 2.0).is_err());
        assert!(SolverConfig::new(1e-12, 10, 1.0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert!((min_value_closed_form(p(0.6), 2.0).unwrap() - 6.76 / 4.4).abs() < 1e-15);
        assert!(min_value_closed_form(p(0.6), 1.0).is_err());
        assert!(min_value_closed_form(p(0.4), 2.0).is_err());
        // The closed form touches 4a(1-a^2) at u = a / (1 - 2a^2).
        let a = 0.6;
        let u_star = a / (1.0 - 2.0 * a * a);
        let v = min_value_closed_form(p(a), u_star).unwrap();
        assert!((v - min_value_lower_bound(p(a))).abs() < 1e-15);
    }
}
