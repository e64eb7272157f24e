//! Closed-form arctan bounds, the two-sided family enclosures built from
//! them, and the monotonicity regime of `f_a`.
//!
//! Every bound is a pure `f64` evaluation. A bound that is only proven for
//! part of the parameter range refuses to evaluate outside it.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, BoundsError, Result};

/// Where `max{pi/2, 1 + a}` switches branches.
pub const EQ9_MAX_SWITCH: f64 = FRAC_PI_2 - 1.0;

/// The real parameter `a` of the family `f_a(x) = (a + sqrt(1+x^2)) atan(x) / x`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShaferParam(pub f64);

impl ShaferParam {
    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() {
            Ok(ShaferParam(a))
        } else {
            Err(BoundsError::param(format!("parameter a must be finite, got {a}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for ShaferParam {
    fn from(a: f64) -> Self {
        ShaferParam(a)
    }
}

impl fmt::Display for ShaferParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Monotonicity of `f_a` on `(0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `a <= -1` or `0 <= a <= 1/2`.
    Increasing,
    /// `a >= 2/pi`.
    Decreasing,
    /// `1/2 < a < 2/pi`: a unique interior minimum.
    InteriorMinimum,
    /// `-1 < a < 0` has no classification.
    Unclassified,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Increasing => "Increasing",
            Regime::Decreasing => "Decreasing",
            Regime::InteriorMinimum => "InteriorMinimum",
            Regime::Unclassified => "Unclassified",
        };
        f.write_str(s)
    }
}

pub fn classify_regime(a: ShaferParam) -> Regime {
    let a = a.0;
    if a <= -1.0 || (0.0..=0.5).contains(&a) {
        Regime::Increasing
    } else if a >= FRAC_2_PI {
        Regime::Decreasing
    } else if a > 0.5 {
        Regime::InteriorMinimum
    } else {
        Regime::Unclassified
    }
}

/// Which side of `atan(x)` a bound sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

impl FromStr for Side {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lower" => Ok(Side::Lower),
            "upper" => Ok(Side::Upper),
            _ => Err(BoundsError::Side { reason: format!("unknown side '{s}'") }),
        }
    }
}

/// Identifier of a catalogued inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundId {
    /// `3x / (1 + 2 sqrt(1+x^2))`, lower.
    Shafer1,
    /// `2x / (1 + sqrt(1+x^2))`, upper.
    Kuang2Upper,
    /// `x / (1+x^2)`, lower.
    Kuang2Lower,
    /// `x`, upper.
    UpperX,
    /// `x - x^3/3`, lower.
    LowerCubic,
    /// `ln(1+x^2) / (2x)`, lower.
    LogLower,
    /// `(1+x) ln(1+x)`, upper.
    LogUpper,
    /// `(1+a)x / (a + sqrt(1+x^2))` for `0 <= a <= 1/2`.
    ShaferFamLower,
    /// `(pi/2)x / (a + sqrt(1+x^2))` for `0 <= a <= 1/2`.
    ShaferFamUpper,
    /// `(pi/2)x / (a + sqrt(1+x^2))` for `a >= 2/pi`.
    RevFamLower,
    /// `(1+a)x / (a + sqrt(1+x^2))` for `a >= 2/pi`.
    RevFamUpper,
    /// `4a(1-a^2)x / (a + sqrt(1+x^2))` for `1/2 < a < 2/pi`.
    Eq9Lower,
    /// `max{pi/2, 1+a}x / (a + sqrt(1+x^2))` for `1/2 < a < 2/pi`.
    Eq9Upper,
    /// `pi^2 x / (2 + 2 pi sqrt(1+x^2))`. Known to be false; kept as errata.
    Eq10PrintedLower,
    /// `pi^2 x / (4 + 2 pi sqrt(1+x^2))`, the `a = 2/pi` reversed lower bound.
    Eq10CorrectedLower,
    /// `(pi+2)x / (2 + pi sqrt(1+x^2))`, upper.
    Eq10Upper,
}

impl BoundId {
    pub const ALL: [BoundId; 16] = [
        BoundId::Shafer1,
        BoundId::Kuang2Upper,
        BoundId::Kuang2Lower,
        BoundId::UpperX,
        BoundId::LowerCubic,
        BoundId::LogLower,
        BoundId::LogUpper,
        BoundId::ShaferFamLower,
        BoundId::ShaferFamUpper,
        BoundId::RevFamLower,
        BoundId::RevFamUpper,
        BoundId::Eq9Lower,
        BoundId::Eq9Upper,
        BoundId::Eq10PrintedLower,
        BoundId::Eq10CorrectedLower,
        BoundId::Eq10Upper,
    ];

    pub fn side(self) -> Side {
        use BoundId::*;
        match self {
            Shafer1 | Kuang2Lower | LowerCubic | LogLower | ShaferFamLower | RevFamLower
            | Eq9Lower | Eq10PrintedLower | Eq10CorrectedLower => Side::Lower,
            Kuang2Upper | UpperX | LogUpper | ShaferFamUpper | RevFamUpper | Eq9Upper
            | Eq10Upper => Side::Upper,
        }
    }

    pub fn is_family(self) -> bool {
        use BoundId::*;
        matches!(
            self,
            ShaferFamLower | ShaferFamUpper | RevFamLower | RevFamUpper | Eq9Lower | Eq9Upper
        )
    }

    /// True for bounds that are known not to hold and are kept only as a
    /// negative regression case.
    pub fn is_errata(self) -> bool {
        self == BoundId::Eq10PrintedLower
    }

    /// Validity predicate on the parameter. Non-family bounds take no parameter.
    pub fn check_param(self, a: Option<ShaferParam>) -> Result<()> {
        use BoundId::*;
        let a = match (self.is_family(), a) {
            (false, None) => return Ok(()),
            (false, Some(a)) => {
                return Err(BoundsError::param(format!("{self} takes no parameter (got a = {a})")))
            }
            (true, None) => return Err(BoundsError::param(format!("{self} requires a parameter a"))),
            (true, Some(a)) => a.0,
        };
        let ok = match self {
            ShaferFamLower | ShaferFamUpper => (0.0..=0.5).contains(&a),
            RevFamLower | RevFamUpper => a >= FRAC_2_PI && a.is_finite(),
            Eq9Lower | Eq9Upper => a > 0.5 && a < FRAC_2_PI,
            _ => unreachable!(),
        };
        if ok {
            Ok(())
        } else {
            Err(BoundsError::param(format!("a = {a} is outside the proven range of {self}")))
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for BoundId {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .iter()
            .copied()
            .find(|id| id.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| BoundsError::param(format!("unknown bound id '{s}'")))
    }
}

/// `sqrt(1 + x^2)` without overflow for large `x`.
#[inline]
pub(crate) fn hyp(x: f64) -> f64 {
    x.hypot(1.0)
}

/// Numerator constant `c` of a family bound `c x / (a + sqrt(1+x^2))`.
pub(crate) fn family_coefficient(id: BoundId, a: f64) -> f64 {
    use BoundId::*;
    match id {
        ShaferFamLower | RevFamUpper => 1.0 + a,
        ShaferFamUpper | RevFamLower => FRAC_PI_2,
        Eq9Lower => 4.0 * a * (1.0 - a * a),
        Eq9Upper => {
            if a >= EQ9_MAX_SWITCH {
                1.0 + a
            } else {
                FRAC_PI_2
            }
        }
        _ => unreachable!("{id} is not a family bound"),
    }
}

/// Evaluates a catalogued bound at `x > 0`.
pub fn eval_bound(id: BoundId, a: Option<ShaferParam>, x: f64) -> Result<f64> {
    require_positive(x)?;
    id.check_param(a)?;
    use BoundId::*;
    let s = hyp(x);
    let v = match id {
        Shafer1 => 3.0 * x / (1.0 + 2.0 * s),
        Kuang2Upper => 2.0 * x / (1.0 + s),
        Kuang2Lower => x / (1.0 + x * x),
        UpperX => x,
        LowerCubic => x - x * x * x / 3.0,
        LogLower => (x * x).ln_1p() / (2.0 * x),
        LogUpper => (1.0 + x) * x.ln_1p(),
        Eq10PrintedLower => PI * PI * x / (2.0 + 2.0 * PI * s),
        Eq10CorrectedLower => PI * PI * x / (4.0 + 2.0 * PI * s),
        Eq10Upper => (PI + 2.0) * x / (2.0 + PI * s),
        _ => {
            let a = a.expect("checked").0;
            family_coefficient(id, a) * x / (a + s)
        }
    };
    Ok(v)
}

/// A pair of bounds sandwiching `atan(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lower: f64,
    pub upper: f64,
    pub half_width: f64,
}

impl Enclosure {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower <= upper) {
            return Err(BoundsError::param(format!("empty enclosure [{lower}, {upper}]")));
        }
        Ok(Enclosure { lower, upper, half_width: (upper - lower) / 2.0 })
    }

    pub fn midpoint(&self) -> f64 {
        self.lower + self.half_width
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Family bound ids `(lower, upper)` usable as a two-sided enclosure for `a`.
pub fn enclosure_ids(a: ShaferParam) -> Result<(BoundId, BoundId)> {
    let v = a.0;
    if (0.0..=0.5).contains(&v) {
        Ok((BoundId::ShaferFamLower, BoundId::ShaferFamUpper))
    } else if v >= FRAC_2_PI && v.is_finite() {
        Ok((BoundId::RevFamLower, BoundId::RevFamUpper))
    } else {
        Err(BoundsError::param(format!(
            "no two-sided family enclosure for a = {v} (need 0 <= a <= 1/2 or a >= 2/pi)"
        )))
    }
}

/// Two-sided enclosure of `atan(x)` from the family bounds at parameter `a`.
pub fn enclosure(a: ShaferParam, x: f64) -> Result<Enclosure> {
    require_positive(x)?;
    let (lo, hi) = enclosure_ids(a)?;
    Enclosure::new(eval_bound(lo, Some(a), x)?, eval_bound(hi, Some(a), x)?)
}

/// Intersection of the family enclosures for every parameter in `params`.
pub fn best_enclosure(x: f64, params: &[ShaferParam]) -> Result<Enclosure> {
    require_positive(x)?;
    if params.is_empty() {
        return Err(BoundsError::param("best_enclosure needs at least one parameter"));
    }
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for &a in params {
        let e = enclosure(a, x)?;
        lower = lower.max(e.lower);
        upper = upper.min(e.upper);
    }
    // Exact bounds always bracket atan(x), so a crossed pair means two
    // bounds agree to within rounding; atan(x) lies between them either way.
    if lower > upper {
        std::mem::swap(&mut lower, &mut upper);
    }
    Enclosure::new(lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_enclosure_survives_rounding_crossover() {
        // Both enclosures are ~x here; their rounded bounds cross by an ulp.
        let x = 2.2555271854651307e-8;
        let e = best_enclosure(x, &[ShaferParam(0.21397204197992056), ShaferParam(0.6833889005985873)]).unwrap();
        assert!(e.lower <= e.upper);
        assert!(e.upper - e.lower <= 4.0 * f64::EPSILON * x);
        assert!((x.atan() - e.midpoint()).abs() <= 4.0 * f64::EPSILON * x);
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn closed_form_values() {
        let v = eval_bound(BoundId::Shafer1, None, 1.0).unwrap();
        assert!(close(v, 0.783_611_624_891_224_3, 1e-15));
        assert_eq!(eval_bound(BoundId::UpperX, None, 0.5).unwrap(), 0.5);

        let printed = eval_bound(BoundId::Eq10PrintedLower, None, 1.0).unwrap();
        assert!(close(printed, 0.906_652_275_386_690_7, 1e-15));
        assert!(printed > std::f64::consts::FRAC_PI_4);

        let corrected = eval_bound(BoundId::Eq10CorrectedLower, None, 1.0).unwrap();
        assert!(close(corrected, 0.765_930_756_139_928_1, 1e-15));
        assert!(corrected < std::f64::consts::FRAC_PI_4);
    }

    #[test]
    fn regimes() {
        let r = |a: f64| classify_regime(ShaferParam(a));
        assert_eq!(r(-2.0), Regime::Increasing);
        assert_eq!(r(-1.0), Regime::Increasing);
        assert_eq!(r(0.0), Regime::Increasing);
        assert_eq!(r(0.25), Regime::Increasing);
        assert_eq!(r(0.5), Regime::Increasing);
        assert_eq!(r(0.6), Regime::InteriorMinimum);
        assert_eq!(r(FRAC_2_PI), Regime::Decreasing);
        assert_eq!(r(0.7), Regime::Decreasing);
        assert_eq!(r(-0.5), Regime::Unclassified);
        assert_eq!(r(-1e-300), Regime::Unclassified);
    }

    #[test]
    fn domain_and_param_errors() {
        assert!(matches!(eval_bound(BoundId::Shafer1, None, 0.0), Err(BoundsError::Domain { .. })));
        assert!(matches!(eval_bound(BoundId::Shafer1, None, -1.0), Err(BoundsError::Domain { .. })));
        assert!(matches!(
            eval_bound(BoundId::ShaferFamLower, Some(ShaferParam(0.6)), 1.0),
            Err(BoundsError::Param { .. })
        ));
        assert!(matches!(eval_bound(BoundId::ShaferFamLower, None, 1.0), Err(BoundsError::Param { .. })));
        assert!(matches!(
            eval_bound(BoundId::Shafer1, Some(ShaferParam(0.5)), 1.0),
            Err(BoundsError::Param { .. })
        ));
        assert!(matches!(
            eval_bound(BoundId::Eq9Lower, Some(ShaferParam(FRAC_2_PI)), 1.0),
            Err(BoundsError::Param { .. })
        ));
        assert!(enclosure(ShaferParam(0.6), 1.0).is_err());
        assert!(enclosure(ShaferParam(-0.1), 1.0).is_err());
        assert!(enclosure(ShaferParam(-2.0), 1.0).is_err());
    }

    #[test]
    fn enclosure_examples() {
        let e = enclosure(ShaferParam(0.5), 1.0).unwrap();
        assert!(close(e.lower, 0.783_611_624_891_224_3, 1e-15));
        assert!(close(e.upper, 0.820_596_174_675_277_0, 1e-15));
        assert!(e.contains(std::f64::consts::FRAC_PI_4));

        let e = enclosure(ShaferParam(FRAC_2_PI), 1.0).unwrap();
        assert!(close(e.lower, 0.765_930_756_139_928_1, 1e-15));
        assert!(close(e.upper, 0.798_026_706_823_803_7, 1e-15));
        assert_eq!(e.half_width, (e.upper - e.lower) / 2.0);

        // a = 0 near the origin: both bounds behave like x.
        let x = 1e-9;
        let e = enclosure(ShaferParam(0.0), x).unwrap();
        assert!(close(e.lower / x.atan(), 1.0, 1e-12));
        assert!(close(e.upper / x.atan(), std::f64::consts::FRAC_PI_2, 1e-12));
    }

    #[test]
    fn eq9_upper_switch() {
        let below = ShaferParam(EQ9_MAX_SWITCH - 1e-3);
        let above = ShaferParam(EQ9_MAX_SWITCH + 1e-3);
        // The switch point lies below 1/2, so the whole Eq9 range uses 1 + a.
        assert!(EQ9_MAX_SWITCH > 0.5);
        let x = 3.0;
        let s = hyp(x);
        assert_eq!(eval_bound(BoundId::Eq9Upper, Some(below), x).unwrap(), FRAC_PI_2 * x / (below.0 + s));
        assert_eq!(eval_bound(BoundId::Eq9Upper, Some(above), x).unwrap(), (1.0 + above.0) * x / (above.0 + s));
    }

    #[test]
    fn special_cases_coincide() {
        for &x in &[1e-6, 0.3, 1.0, 7.5, 1e6] {
            let eq2 = eval_bound(BoundId::Kuang2Upper, None, x).unwrap();
            let rev1 = eval_bound(BoundId::RevFamUpper, Some(ShaferParam(1.0)), x).unwrap();
            assert_eq!(eq2, rev1);
            let eq1 = eval_bound(BoundId::Shafer1, None, x).unwrap();
            let fam = eval_bound(BoundId::ShaferFamLower, Some(ShaferParam(0.5)), x).unwrap();
            assert!(close(eq1, fam, 4.0 * f64::EPSILON * eq1));
        }
    }

    #[test]
    fn best_enclosure_examples() {
        let params = [ShaferParam(0.5), ShaferParam(FRAC_2_PI)];
        let e = best_enclosure(1.0, &params).unwrap();
        assert!(close(e.lower, 0.783_611_624_891_224_3, 1e-15));

        let e = best_enclosure(100.0, &params).unwrap();
        let rev = enclosure(ShaferParam(FRAC_2_PI), 100.0).unwrap();
        assert_eq!(e.lower, rev.lower);

        let single = best_enclosure(2.5, &[ShaferParam(0.25)]).unwrap();
        assert_eq!(single, enclosure(ShaferParam(0.25), 2.5).unwrap());

        assert!(best_enclosure(1.0, &[]).is_err());
    }

    #[test]
    fn id_parse_round_trip() {
        for id in BoundId::ALL {
            assert_eq!(id.to_string().parse::<BoundId>().unwrap(), id);
        }
        assert!("nope".parse::<BoundId>().is_err());
    }
}
