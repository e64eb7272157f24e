//! Error-bounded high-precision reference for `atan` and for every catalogued
//! bound, plus the grid sweeps and dominance comparisons built on it.
//!
//! Arithmetic is decimal fixed point (`raw / 10^digits`) carried out at
//! `digits + GUARD_DIGITS` and rounded once at the end.

mod dominance;
mod fixed;
mod sweep;

use std::f64::consts::FRAC_2_PI;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use dominance::{dominance_report, DominanceConfig, DominanceReport, Region, Tighter};
pub use fixed::HighPrecision;
pub use sweep::{sweep, GridSpec, OracleTable, Spacing, SweepReport, SweepRow, Violation};

use crate::catalog::{BoundId, ShaferParam};
use crate::error::{require_positive, BoundsError, Result};
use fixed::Ctx;

/// Extra working digits. Accumulated truncation stays below `10^3` working
/// units, so the final rounding to the requested digits dominates.
pub const GUARD_DIGITS: u32 = 12;
pub const MIN_DIGITS: u32 = 20;
pub const MAX_DIGITS: u32 = 4000;
/// Digits used by sweeps unless told otherwise. The smallest true margin on
/// the default grid is `x^5/5 ~ 2e-41` (the cubic lower bound at `x = 1e-8`).
pub const DEFAULT_SWEEP_DIGITS: u32 = 60;

/// Target number of correct decimal digits (absolute error below `10^-digits`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub decimal_digits: u32,
}

impl Precision {
    pub fn new(decimal_digits: u32) -> Result<Self> {
        if !(MIN_DIGITS..=MAX_DIGITS).contains(&decimal_digits) {
            return Err(BoundsError::Precision {
                reason: format!(
                    "{decimal_digits} digits requested; the oracle supports {MIN_DIGITS}..={MAX_DIGITS}"
                ),
            });
        }
        Ok(Precision { decimal_digits })
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision { decimal_digits: DEFAULT_SWEEP_DIGITS }
    }
}

/// Reference evaluator at a fixed precision. Holds `pi` and `ln 2` at working
/// precision so repeated calls do not recompute them.
#[derive(Debug, Clone)]
pub struct Oracle {
    precision: Precision,
    ctx: Ctx,
    pi: BigInt,
    ln2: BigInt,
    term_budget: usize,
}

impl Oracle {
    pub fn new(precision: Precision) -> Result<Self> {
        let precision = Precision::new(precision.decimal_digits)?;
        let ctx = Ctx::new(precision.decimal_digits + GUARD_DIGITS);
        // Each series term below gains at least log10(5^2) > 1.3 digits.
        let term_budget = ctx.digits as usize + 16;
        let mut oracle = Oracle { precision, ctx, pi: BigInt::zero(), ln2: BigInt::zero(), term_budget };
        oracle.pi = oracle.machin_pi()?;
        oracle.ln2 = oracle.ln2_series()?;
        Ok(oracle)
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn digits(&self) -> u32 {
        self.precision.decimal_digits
    }

    fn out(&self, raw: BigInt) -> HighPrecision {
        self.ctx.finish(raw).rescale(self.precision.decimal_digits)
    }

    pub fn pi(&self) -> HighPrecision {
        self.out(self.pi.clone())
    }

    /// `atan(1/n)` by its alternating series on integers.
    fn atan_inv(&self, n: u32) -> Result<BigInt> {
        let n2 = BigInt::from(n) * n;
        let mut power = &self.ctx.one / n;
        let mut sum = power.clone();
        let mut k: u32 = 1;
        loop {
            power /= &n2;
            if power.is_zero() {
                return Ok(sum);
            }
            let term = &power / (2 * k + 1);
            if k % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
            k += 1;
            if k as usize > self.term_budget {
                return Err(self.budget_error("atan(1/n)"));
            }
        }
    }

    fn machin_pi(&self) -> Result<BigInt> {
        Ok(self.atan_inv(5)? * 16 - self.atan_inv(239)? * 4)
    }

    fn ln2_series(&self) -> Result<BigInt> {
        // ln 2 = 2 atanh(1/3)
        let mut power: BigInt = &self.ctx.one / 3u32;
        let mut sum = power.clone();
        let mut k: u32 = 1;
        loop {
            power /= 9;
            if power.is_zero() {
                return Ok(sum * 2);
            }
            sum += &power / (2 * k + 1);
            k += 1;
            if k as usize > 2 * self.term_budget {
                return Err(self.budget_error("ln 2"));
            }
        }
    }

    fn budget_error(&self, what: &str) -> BoundsError {
        BoundsError::Precision {
            reason: format!("{what} series exceeded {} terms at {} digits", self.term_budget, self.ctx.digits),
        }
    }

    /// Taylor series of `atan(y)` for `|y| < 1/8`; stops once the next power
    /// of `y`, which bounds the remainder, vanishes at working precision.
    fn atan_taylor(&self, y: &BigInt) -> Result<BigInt> {
        let c = &self.ctx;
        let y2 = c.mul(y, y);
        let mut power = y.clone();
        let mut sum = y.clone();
        let mut k: u32 = 1;
        loop {
            power = c.mul(&power, &y2);
            if power.is_zero() {
                return Ok(sum);
            }
            let term = &power / (2 * k + 1);
            if k % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
            k += 1;
            if k as usize > self.term_budget {
                return Err(self.budget_error("atan"));
            }
        }
    }

    /// `atan(t)` for `0 <= t <= 1` at working precision: halve the argument with
    /// `atan t = 2 atan(t / (1 + sqrt(1 + t^2)))` until `t < 1/8`.
    fn atan_unit(&self, t: BigInt) -> Result<BigInt> {
        let c = &self.ctx;
        let eighth = &c.one / 8;
        let mut t = t;
        let mut doublings = 0u32;
        while t >= eighth {
            let root = c.sqrt(&(&c.one + c.mul(&t, &t)));
            t = c.div(&t, &(&c.one + root));
            doublings += 1;
        }
        Ok(self.atan_taylor(&t)? << doublings)
    }

    /// `atan(|x|)` at working precision.
    fn atan_abs_working(&self, x: f64) -> Result<BigInt> {
        let ax = x.abs();
        if ax <= 1.0 {
            self.atan_unit(self.ctx.from_f64(ax))
        } else {
            let tail = self.atan_unit(self.ctx.recip_f64(ax))?;
            Ok((&self.pi >> 1) - tail)
        }
    }

    /// `atan(x)` with absolute error below `10^-digits`. Odd symmetry is exact:
    /// the magnitude is computed once and the sign applied afterwards.
    pub fn atan(&self, x: f64) -> Result<HighPrecision> {
        if !x.is_finite() {
            return Err(BoundsError::Domain { what: "oracle argument must be finite", value: x });
        }
        if x == 0.0 {
            return Ok(HighPrecision::zero(self.digits()));
        }
        let mag = self.out(self.atan_abs_working(x)?);
        Ok(if x < 0.0 { -&mag } else { mag })
    }

    /// `ln(z)` for `z > 0` at working precision.
    fn ln_working(&self, z: &BigInt) -> Result<BigInt> {
        let c = &self.ctx;
        assert!(z.is_positive(), "logarithm of a non-positive value");
        // z = r * 2^k with r in [1/sqrt 2, sqrt 2).
        let mut k = z.bits() as i64 - c.one.bits() as i64;
        let mut r = if k >= 0 { z >> k as u32 } else { z << (-k) as u32 };
        let sqrt2 = c.sqrt(&c.int(2));
        while r >= sqrt2 {
            r >>= 1;
            k += 1;
        }
        let inv_sqrt2 = &sqrt2 >> 1;
        while r < inv_sqrt2 {
            r <<= 1;
            k -= 1;
        }
        // ln r = 2 atanh(t), t = (r - 1) / (r + 1), |t| < 0.172
        let t = c.div(&(&r - &c.one), &(&r + &c.one));
        let t2 = c.mul(&t, &t);
        let mut power = t.clone();
        let mut sum = t.clone();
        let mut n: u32 = 1;
        loop {
            power = c.mul(&power, &t2);
            if power.is_zero() {
                break;
            }
            sum += &power / (2 * n + 1);
            n += 1;
            if n as usize > self.term_budget {
                return Err(self.budget_error("ln"));
            }
        }
        Ok(sum * 2 + &self.ln2 * k)
    }

    /// High-precision value of a catalogued bound at `x`, with `x` and `a`
    /// taken as the exact binary values of the doubles passed in.
    pub fn eval_bound(&self, id: BoundId, a: Option<ShaferParam>, x: f64) -> Result<HighPrecision> {
        require_positive(x)?;
        id.check_param(a)?;
        let c = &self.ctx;
        let one = &c.one;
        let xv = c.from_f64(x);
        let x2 = c.mul(&xv, &xv);
        let s = c.sqrt(&(one + &x2));
        let pi = &self.pi;
        let half_pi: BigInt = pi >> 1;
        use BoundId::*;
        let raw = match id {
            Shafer1 => c.div(&(&xv * 3), &(one + &s * 2)),
            Kuang2Upper => c.div(&(&xv * 2), &(one + &s)),
            Kuang2Lower => c.div(&xv, &(one + &x2)),
            UpperX => xv.clone(),
            LowerCubic => &xv - c.mul(&x2, &xv) / 3,
            LogLower => c.div(&self.ln_working(&(one + &x2))?, &(&xv * 2)),
            LogUpper => c.mul(&(one + &xv), &self.ln_working(&(one + &xv))?),
            Eq10PrintedLower => {
                c.div(&c.mul(&c.mul(pi, pi), &xv), &(c.int(2) + c.mul(&(pi * 2), &s)))
            }
            Eq10CorrectedLower => {
                c.div(&c.mul(&c.mul(pi, pi), &xv), &(c.int(4) + c.mul(&(pi * 2), &s)))
            }
            Eq10Upper => c.div(&c.mul(&(pi + c.int(2)), &xv), &(c.int(2) + c.mul(pi, &s))),
            ShaferFamLower | ShaferFamUpper | RevFamLower | RevFamUpper | Eq9Lower | Eq9Upper => {
                let a_f = a.expect("checked").0;
                let av = c.from_f64(a_f);
                let coef = match id {
                    ShaferFamLower | RevFamUpper => one + &av,
                    ShaferFamUpper | RevFamLower => half_pi,
                    Eq9Lower => c.mul(&(&av * 4), &(one - c.mul(&av, &av))),
                    _ => half_pi.max(one + &av),
                };
                c.div(&c.mul(&coef, &xv), &(&av + &s))
            }
        };
        Ok(self.out(raw))
    }

    /// `f_a(x) = (a + sqrt(1+x^2)) atan(x) / x` at high precision.
    pub fn family_value(&self, a: ShaferParam, x: f64) -> Result<HighPrecision> {
        require_positive(x)?;
        let c = &self.ctx;
        let xv = c.from_f64(x);
        let s = c.sqrt(&(&c.one + c.mul(&xv, &xv)));
        let at = self.atan_abs_working(x)?;
        let num = c.mul(&(c.from_f64(a.0) + s), &at);
        Ok(self.out(c.div(&num, &xv)))
    }

    /// `2/pi` at the oracle's precision.
    pub fn two_over_pi(&self) -> HighPrecision {
        self.out(self.ctx.div(&self.ctx.int(2), &self.pi))
    }
}

/// One-shot `atan(x)` with absolute error below `10^-p.decimal_digits`.
pub fn oracle_arctan(x: f64, p: Precision) -> Result<HighPrecision> {
    Oracle::new(p)?.atan(x)
}

/// Whether the double nearest `2/pi` lies above the true value (it does, so
/// `a = FRAC_2_PI` sits inside the reversed regime).
pub fn frac_2_pi_is_above_exact(oracle: &Oracle) -> bool {
    HighPrecision::from_f64(FRAC_2_PI, oracle.digits()) > oracle.two_over_pi()
}
