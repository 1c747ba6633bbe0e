//! Fixed-point reals with a binary scale, enough for logarithms of exact
//! rationals to a requested number of decimal digits.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rat::Rat;

/// Extra binary digits carried beyond the requested decimal precision.
const GUARD_BITS: u32 = 64;

/// `value / 2^bits`, printed with `digits` decimals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Real {
    value: BigInt,
    bits: u32,
    digits: u32,
}

/// Binary scale used for `digits` decimal digits.
pub fn bits_for(digits: u32) -> u32 {
    // log2(10) < 3.3220
    (digits * 33220).div_ceil(10000) + GUARD_BITS
}

impl Real {
    pub fn zero(digits: u32) -> Real {
        Real { value: BigInt::zero(), bits: bits_for(digits), digits }
    }

    /// `r` rounded toward zero at the scale for `digits`.
    pub fn from_rat(r: &Rat, digits: u32) -> Real {
        let bits = bits_for(digits);
        let value = (r.numer() << bits) / r.denom();
        Real { value, bits, digits }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    fn with_value(&self, value: BigInt) -> Real {
        Real { value, bits: self.bits, digits: self.digits }
    }

    fn check_scale(&self, other: &Real) {
        assert_eq!(self.bits, other.bits, "mixing reals of different precision");
    }

    pub fn add(&self, other: &Real) -> Real {
        self.check_scale(other);
        self.with_value(&self.value + &other.value)
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.check_scale(other);
        self.with_value(&self.value - &other.value)
    }

    pub fn neg(&self) -> Real {
        self.with_value(-&self.value)
    }

    pub fn abs(&self) -> Real {
        self.with_value(self.value.abs())
    }

    pub fn mul_rat(&self, r: &Rat) -> Real {
        self.with_value(&self.value * r.numer() / r.denom())
    }

    pub fn div_int(&self, n: u64) -> Real {
        self.with_value(&self.value / BigInt::from(n))
    }

    pub fn is_negative(&self) -> bool {
        self.value.sign() == Sign::Minus
    }

    /// `10^−digits` at this scale: the tolerance for comparisons.
    pub fn tolerance(&self) -> Real {
        let ten = BigInt::from(10).pow(self.digits);
        self.with_value((BigInt::one() << self.bits) / ten)
    }

    /// Equal when the two values differ by at most `10^−digits`.
    pub fn cmp_tol(&self, other: &Real) -> Ordering {
        let d = self.sub(other);
        if d.abs() <= self.tolerance() {
            Ordering::Equal
        } else {
            d.value.sign().cmp(&Sign::NoSign)
        }
    }

    pub fn approx_eq(&self, other: &Real) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }

    pub fn to_f64(&self) -> f64 {
        Rat::new(self.value.clone(), BigInt::one() << self.bits).to_f64()
    }

    /// Decimal string with exactly `digits` places, rounded half away from zero.
    pub fn to_decimal(&self) -> String {
        let ten = BigInt::from(10).pow(self.digits);
        let scaled = self.value.abs() * ten * 2 + (BigInt::one() << self.bits);
        let rounded: BigInt = scaled >> (self.bits + 1);
        let (int, frac) = rounded.div_rem(&BigInt::from(10).pow(self.digits));
        let sign = if self.is_negative() && !rounded.is_zero() { "-" } else { "" };
        if self.digits == 0 {
            return format!("{sign}{int}");
        }
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = self.digits as usize)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        self.check_scale(other);
        self.value.cmp(&other.value)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

/// `2^bits · atanh(u/v)` for `0 ≤ u/v ≤ 1/3`, truncated.
fn atanh_scaled(u: &BigInt, v: &BigInt, bits: u32) -> BigInt {
    let mut power = (u << bits) / v;
    let (u2, v2) = (u * u, v * v);
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !power.is_zero() {
        sum += &power / BigInt::from(k);
        power = power * &u2 / &v2;
        k += 2;
    }
    sum
}

/// Natural logarithms at a fixed scale, with a cache for integer arguments.
#[derive(Debug, Clone)]
pub struct LnContext {
    digits: u32,
    bits: u32,
    ln2: BigInt,
    cache: HashMap<BigInt, BigInt>,
}

impl LnContext {
    pub fn new(digits: u32) -> Self {
        let bits = bits_for(digits);
        // ln 2 = 2 atanh(1/3)
        let ln2 = atanh_scaled(&BigInt::one(), &BigInt::from(3), bits) * 2;
        LnContext { digits, bits, ln2, cache: HashMap::new() }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    fn real(&self, value: BigInt) -> Real {
        Real { value, bits: self.bits, digits: self.digits }
    }

    pub fn ln2(&self) -> Real {
        self.real(self.ln2.clone())
    }

    /// `ln m` for an integer `m ≥ 1`, scaled: with `2^k ≤ m < 2^(k+1)`,
    /// `ln m = k ln 2 + 2 atanh((m − 2^k)/(m + 2^k))` and the argument lies in `[0, 1/3)`.
    fn ln_int_scaled(&mut self, m: &BigInt) -> BigInt {
        assert!(m.is_positive(), "logarithm of a nonpositive integer");
        if m.is_one() {
            return BigInt::zero();
        }
        if let Some(v) = self.cache.get(m) {
            return v.clone();
        }
        let k = m.bits() - 1;
        let p = BigInt::one() << k;
        let v: BigInt = &self.ln2 * BigInt::from(k) + atanh_scaled(&(m - &p), &(m + &p), self.bits) * 2;
        self.cache.insert(m.clone(), v.clone());
        v
    }

    pub fn ln_int(&mut self, m: u64) -> Real {
        let v = self.ln_int_scaled(&BigInt::from(m));
        self.real(v)
    }

    /// `ln r` for `r > 0`.
    pub fn ln(&mut self, r: &Rat) -> Real {
        assert!(r.is_positive(), "logarithm of a nonpositive number");
        let v = self.ln_int_scaled(r.numer()) - self.ln_int_scaled(r.denom());
        self.real(v)
    }

    /// `−μ ln μ` for `μ > 0`.
    pub fn neg_x_ln_x(&mut self, mu: &Rat) -> Real {
        let l = self.ln(mu);
        l.mul_rat(mu).neg()
    }

    pub fn zero(&self) -> Real {
        self.real(BigInt::zero())
    }
}

/// Parses a decimal such as `0.1`, `2`, `-1.25` or `1e-3` into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Ok(r) = s.parse::<Rat>() {
        return Some(r);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rat::from(digits * ten.pow(scale.to_u32()?))
    } else {
        Rat::new(digits, ten.pow((-scale).to_u32()?))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    const LN2_60: &str = "0.693147180559945309417232121458176568075500134360255254120680";
    const LN3_50: &str = "1.09861228866810969139524523692252570464749055782275";

    #[test]
    fn ln2_and_ln3_match_known_digits() {
        let mut ctx = LnContext::new(60);
        assert_eq!(ctx.ln2().to_decimal(), LN2_60);
        let mut ctx50 = LnContext::new(50);
        assert_eq!(ctx50.ln_int(3).to_decimal(), LN3_50);
        assert_eq!(ctx.ln_int(1024).to_decimal(), ctx.ln2().mul_rat(&r(10, 1)).to_decimal());
    }

    #[test]
    fn ln_of_rationals() {
        let mut ctx = LnContext::new(50);
        let half = ctx.ln(&r(1, 2));
        assert!(half.approx_eq(&ctx.ln2().neg()));
        let a = ctx.ln(&r(10, 3));
        let b = ctx.ln_int(10).sub(&ctx.ln_int(3));
        assert!(a.approx_eq(&b));
        assert!((ctx.ln_int(7).to_f64() - 7f64.ln()).abs() < 1e-15);
        assert!((ctx.ln(&r(123456, 789)).to_f64() - (123456f64 / 789f64).ln()).abs() < 1e-13);
    }

    #[test]
    fn decimal_output_and_tolerance() {
        let x = Real::from_rat(&r(-1, 3), 5);
        assert_eq!(x.to_decimal(), "-0.33333");
        assert_eq!(Real::from_rat(&r(2, 3), 3).to_decimal(), "0.667");
        assert_eq!(Real::from_rat(&r(0, 1), 2).to_decimal(), "0.00");
        let a = Real::from_rat(&r(1, 10), 10);
        let b = Real::from_rat(&(r(1, 10) + Rat::new(1, BigInt::from(10).pow(12))), 10);
        assert!(a.approx_eq(&b));
        assert_eq!(a.cmp_tol(&Real::from_rat(&r(1, 5), 10)), Ordering::Less);
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("0.1"), Some(r(1, 10)));
        assert_eq!(parse_decimal("1.0"), Some(r(1, 1)));
        assert_eq!(parse_decimal("-2.50"), Some(r(-5, 2)));
        assert_eq!(parse_decimal("3/7"), Some(r(3, 7)));
        assert_eq!(parse_decimal("1e-3"), Some(r(1, 1000)));
        assert_eq!(parse_decimal(".5"), Some(r(1, 2)));
        assert_eq!(parse_decimal("abc"), None);
        assert_eq!(parse_decimal("."), None);
    }
}
