//! Decimal fixed-point numbers on top of `BigInt`: a value is `raw / 10^digits`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) fn pow10(digits: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), digits as usize)
}

/// Exact binary decomposition `x = mantissa * 2^exponent` of a finite double.
pub(crate) fn decompose(x: f64) -> (BigInt, i32) {
    debug_assert!(x.is_finite());
    let bits = x.to_bits();
    let neg = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if biased == 0 { (frac, -1074) } else { (frac | (1u64 << 52), biased - 1075) };
    let m = BigInt::from(m);
    (if neg { -m } else { m }, e)
}

/// `round(n / 2^k)`, halves away from zero.
pub(crate) fn shr_round(n: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return n.clone();
    }
    let half = BigInt::one() << (k - 1);
    let mag = (n.abs() + half) >> k;
    if n.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Floor square root by Newton's iteration, starting from a power of two
/// that is known to be at least the root.
pub(crate) fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "square root of a negative number");
    if n.is_zero() {
        return BigInt::zero();
    }
    let bits = n.bits();
    let mut x: BigInt = BigInt::one() << ((bits + 1) / 2);
    loop {
        let y: BigInt = (&x + n / &x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// A real number held as an integer multiple of `10^-digits`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HighPrecision {
    raw: BigInt,
    digits: u32,
}

impl HighPrecision {
    pub fn from_raw(raw: BigInt, digits: u32) -> Self {
        HighPrecision { raw, digits }
    }

    pub fn zero(digits: u32) -> Self {
        HighPrecision { raw: BigInt::zero(), digits }
    }

    /// Nearest fixed-point value to the double `x`.
    pub fn from_f64(x: f64, digits: u32) -> Self {
        assert!(x.is_finite(), "cannot convert non-finite {x}");
        let (m, e) = decompose(x);
        let scaled = m * pow10(digits);
        let raw = if e >= 0 { scaled << e as u32 } else { shr_round(&scaled, (-e) as u32) };
        HighPrecision { raw, digits }
    }

    pub fn raw(&self) -> &BigInt {
        &self.raw
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.raw.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.raw.is_negative()
    }

    pub fn abs(&self) -> Self {
        HighPrecision { raw: self.raw.abs(), digits: self.digits }
    }

    /// Re-expresses the value with `digits` fractional digits, rounding to nearest.
    pub fn rescale(&self, digits: u32) -> Self {
        let raw = match digits.cmp(&self.digits) {
            Ordering::Equal => self.raw.clone(),
            Ordering::Greater => &self.raw * pow10(digits - self.digits),
            Ordering::Less => {
                let d = pow10(self.digits - digits);
                let half: BigInt = &d >> 1u32;
                let mag: BigInt = (self.raw.abs() + half).div_floor(&d);
                if self.raw.is_negative() {
                    -mag
                } else {
                    mag
                }
            }
        };
        HighPrecision { raw, digits }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let d = self.digits.max(other.digits);
        (self.rescale(d).raw, other.rescale(d).raw, d)
    }

    /// Nearest double (up to one unit in the last place).
    pub fn to_f64(&self) -> f64 {
        if self.raw.is_zero() {
            return 0.0;
        }
        let den = pow10(self.digits);
        let mag = self.raw.abs();
        // Shift so that the integer quotient carries at least 64 significant bits.
        let shift = (64 + den.bits() as i64 - mag.bits() as i64).max(0) as u32;
        let q: BigInt = (mag << shift) / den;
        let mut v = q.to_f64().unwrap_or(f64::INFINITY);
        let mut k = shift as i32;
        while k > 0 {
            let step = k.min(1000);
            v *= 2f64.powi(-step);
            k -= step;
        }
        if self.raw.sign() == Sign::Minus {
            -v
        } else {
            v
        }
    }

    /// Plain decimal expansion, e.g. `-0.785398...`.
    pub fn to_decimal_string(&self) -> String {
        let mag = self.raw.abs().to_string();
        let d = self.digits as usize;
        let padded = if mag.len() <= d { format!("{}{}", "0".repeat(d + 1 - mag.len()), mag) } else { mag };
        let (int, frac) = padded.split_at(padded.len() - d);
        let sign = if self.raw.is_negative() { "-" } else { "" };
        if d == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl fmt::Debug for HighPrecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HighPrecision({})", self.to_decimal_string())
    }
}

impl fmt::Display for HighPrecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl PartialOrd for HighPrecision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HighPrecision {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &HighPrecision {
    type Output = HighPrecision;

    fn add(self, rhs: &HighPrecision) -> HighPrecision {
        let (a, b, digits) = self.aligned(rhs);
        HighPrecision { raw: a + b, digits }
    }
}

impl Sub for &HighPrecision {
    type Output = HighPrecision;

    fn sub(self, rhs: &HighPrecision) -> HighPrecision {
        let (a, b, digits) = self.aligned(rhs);
        HighPrecision { raw: a - b, digits }
    }
}

impl Neg for &HighPrecision {
    type Output = HighPrecision;

    fn neg(self) -> HighPrecision {
        HighPrecision { raw: -&self.raw, digits: self.digits }
    }
}

/// Working arithmetic at a fixed number of fractional digits. Every
/// operation truncates to the working unit `10^-digits`.
#[derive(Debug, Clone)]
pub(crate) struct Ctx {
    pub(crate) digits: u32,
    pub(crate) one: BigInt,
}

impl Ctx {
    pub(crate) fn new(digits: u32) -> Self {
        Ctx { digits, one: pow10(digits) }
    }

    pub(crate) fn int(&self, n: i64) -> BigInt {
        BigInt::from(n) * &self.one
    }

    pub(crate) fn from_f64(&self, x: f64) -> BigInt {
        HighPrecision::from_f64(x, self.digits).raw
    }

    /// `1 / x` for a non-zero double, rounded once.
    pub(crate) fn recip_f64(&self, x: f64) -> BigInt {
        let (m, e) = decompose(x);
        // 1 / (m 2^e) = 2^-e / m
        if e <= 0 {
            (&self.one << (-e) as u32) / m
        } else {
            &self.one / (m << e as u32)
        }
    }

    pub(crate) fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) / &self.one
    }

    pub(crate) fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * &self.one) / b
    }

    pub(crate) fn sqrt(&self, a: &BigInt) -> BigInt {
        isqrt(&(a * &self.one))
    }

    pub(crate) fn finish(&self, raw: BigInt) -> HighPrecision {
        HighPrecision { raw, digits: self.digits }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_is_floor_root() {
        for n in [0u64, 1, 2, 3, 4, 15, 16, 17, 99, 100, 101, 1 << 40, u64::MAX] {
            let r = isqrt(&BigInt::from(n));
            let r1 = &r + 1;
            assert!(&r * &r <= BigInt::from(n) && BigInt::from(n) < &r1 * &r1, "n = {n}");
        }
    }

    #[test]
    fn f64_conversion_is_exact_enough() {
        for &x in &[1.0, -0.5, 0.1, 1e-8, 1e8, 3.141592653589793, -2.5e-3, 7e300] {
            let h = HighPrecision::from_f64(x, 40);
            assert_eq!(h.to_f64(), x, "x = {x}");
        }
        assert_eq!(HighPrecision::from_f64(0.5, 3).to_decimal_string(), "0.500");
        assert_eq!(HighPrecision::from_f64(-0.125, 2).to_decimal_string(), "-0.13");
    }

    #[test]
    fn rescale_and_order() {
        let a = HighPrecision::from_f64(0.25, 10);
        let b = HighPrecision::from_f64(0.25, 30);
        assert_eq!(a.cmp(&b), Ordering::Equal);
        assert!(HighPrecision::from_f64(0.3, 20) > a);
        let d = &b - &a;
        assert!(d.is_zero());
        assert_eq!((&a + &a).to_f64(), 0.5);
    }

    #[test]
    fn reciprocal_of_double() {
        let c = Ctx::new(30);
        assert_eq!(c.finish(c.recip_f64(4.0)).to_f64(), 0.25);
        assert_eq!(c.finish(c.recip_f64(1e8)).to_f64(), 1e-8);
    }
}
