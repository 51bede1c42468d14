//! Exact radix expansion, integer floor-logarithm and power-interval
//! localization.
//!
//! Every ordering and containment decision is made on exact integers.
//! [`delta`] is the only floating-point output and nothing in this crate
//! uses it to localize a value.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base-`b` digits of a positive integer, most significant first.
///
/// Only constructible through [`expand`] or a validated deserialization,
/// so the invariants (leading digit nonzero, all digits below the base,
/// value reconstructs exactly) always hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawExpansion", into = "RawExpansion")]
pub struct RadixExpansion {
    base: BigUint,
    digits: Vec<BigUint>,
    value: BigUint,
}

#[derive(Serialize, Deserialize)]
struct RawExpansion {
    #[serde(with = "crate::decimal")]
    base: BigUint,
    #[serde(with = "crate::decimal::seq")]
    digits: Vec<BigUint>,
    exponent: u64,
    #[serde(with = "crate::decimal")]
    value: BigUint,
}

impl From<RadixExpansion> for RawExpansion {
    fn from(e: RadixExpansion) -> Self {
        RawExpansion {
            exponent: e.leading_exponent(),
            base: e.base,
            digits: e.digits,
            value: e.value,
        }
    }
}

impl TryFrom<RawExpansion> for RadixExpansion {
    type Error = Error;

    fn try_from(raw: RawExpansion) -> Result<Self> {
        let expected = expand(raw.value.clone(), raw.base.clone())?;
        if expected.digits != raw.digits || expected.leading_exponent() != raw.exponent {
            return Err(Error::InvalidArgument(format!(
                "digits do not match the base-{} expansion of {}",
                raw.base, raw.value
            )));
        }
        Ok(expected)
    }
}

impl RadixExpansion {
    pub fn base(&self) -> &BigUint {
        &self.base
    }

    /// Digits from `b_n` down to `b_0`.
    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// The exponent `n` of the leading term, `digits().len() - 1`.
    pub fn leading_exponent(&self) -> u64 {
        (self.digits.len() - 1) as u64
    }

    pub fn leading_digit(&self) -> &BigUint {
        &self.digits[0]
    }

    /// Horner evaluation of the digits; equals `value()` by construction.
    pub fn reconstruct(&self) -> BigUint {
        self.digits
            .iter()
            .fold(BigUint::zero(), |acc, d| acc * &self.base + d)
    }

    /// `(digit, exponent)` pairs for the nonzero terms, highest first.
    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, u64)> + '_ {
        let n = self.leading_exponent();
        self.digits
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(move |(i, d)| (d, n - i as u64))
    }

    pub fn interval(&self) -> PowerInterval {
        PowerInterval::new(self.base.clone(), self.leading_exponent())
    }
}

/// One-line form: `1132 = 1*2^10 + 1*2^6 + 1*2^5 + 1*2^3 + 1*2^2 (base 2)`.
/// Zero terms are omitted; the `b^0` term is written as the bare digit.
impl fmt::Display for RadixExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.value)?;
        for (i, (digit, exp)) in self.terms().enumerate() {
            let sep = if i == 0 { " " } else { " + " };
            if exp == 0 {
                write!(f, "{sep}{digit}")?;
            } else {
                write!(f, "{sep}{digit}*{}^{exp}", self.base)?;
            }
        }
        write!(f, " (base {})", self.base)
    }
}

/// The half-open interval `[base^e, base^(e+1))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval", into = "RawInterval")]
pub struct PowerInterval {
    base: BigUint,
    exponent: u64,
    lower: BigUint,
    upper: BigUint,
}

#[derive(Serialize, Deserialize)]
struct RawInterval {
    #[serde(with = "crate::decimal")]
    base: BigUint,
    exponent: u64,
    #[serde(with = "crate::decimal")]
    lower: BigUint,
    #[serde(with = "crate::decimal")]
    upper: BigUint,
}

impl From<PowerInterval> for RawInterval {
    fn from(p: PowerInterval) -> Self {
        RawInterval {
            base: p.base,
            exponent: p.exponent,
            lower: p.lower,
            upper: p.upper,
        }
    }
}

impl TryFrom<RawInterval> for PowerInterval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        check_base(&raw.base)?;
        let p = PowerInterval::new(raw.base, raw.exponent);
        if p.lower != raw.lower || p.upper != raw.upper {
            return Err(Error::InvalidArgument(format!(
                "interval endpoints do not match {}^{}",
                p.base, p.exponent
            )));
        }
        Ok(p)
    }
}

impl PowerInterval {
    /// Callers guarantee `base >= 2`.
    pub(crate) fn new(base: BigUint, exponent: u64) -> Self {
        let lower = pow(&base, exponent);
        let upper = &lower * &base;
        PowerInterval {
            base,
            exponent,
            lower,
            upper,
        }
    }

    pub fn base(&self) -> &BigUint {
        &self.base
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn lower(&self) -> &BigUint {
        &self.lower
    }

    pub fn upper(&self) -> &BigUint {
        &self.upper
    }

    pub fn contains(&self, value: &BigUint) -> bool {
        &self.lower <= value && value < &self.upper
    }
}

impl fmt::Display for PowerInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lower, self.upper)
    }
}

fn check_base(base: &BigUint) -> Result<()> {
    if *base < BigUint::from(2u32) {
        return Err(Error::BaseTooSmall(base.clone()));
    }
    Ok(())
}

fn check_operands(value: &BigUint, base: &BigUint) -> Result<()> {
    check_base(base)?;
    if value.is_zero() {
        return Err(Error::ZeroValue);
    }
    Ok(())
}

/// `base^exp` by binary exponentiation.
pub fn pow(base: &BigUint, exp: u64) -> BigUint {
    let mut result = BigUint::one();
    let mut square = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &square;
        }
        e >>= 1;
        if e > 0 {
            square = &square * &square;
        }
    }
    result
}

/// Base-`base` expansion of `value`.
pub fn expand(value: impl Into<BigUint>, base: impl Into<BigUint>) -> Result<RadixExpansion> {
    let value = value.into();
    let base = base.into();
    check_operands(&value, &base)?;
    let mut digits = Vec::new();
    let mut rest = value.clone();
    while !rest.is_zero() {
        let (q, d) = rest.div_rem(&base);
        digits.push(d);
        rest = q;
    }
    digits.reverse();
    Ok(RadixExpansion {
        base,
        digits,
        value,
    })
}

/// Largest `e` with `base^e <= value`, by repeated multiplication.
pub fn floor_log(value: &BigUint, base: &BigUint) -> Result<u64> {
    check_operands(value, base)?;
    let mut power = base.clone();
    let mut e = 0u64;
    while &power <= value {
        power *= base;
        e += 1;
    }
    Ok(e)
}

/// The power interval `[base^n, base^(n+1))` containing `value`.
pub fn localize(value: &BigUint, base: &BigUint) -> Result<PowerInterval> {
    let e = floor_log(value, base)?;
    Ok(PowerInterval::new(base.clone(), e))
}

/// `log_base(value)` as a float, clamped into `[n, n + 1)` with
/// `n = floor_log(value, base)` and exact on perfect powers.
pub fn delta(value: &BigUint, base: &BigUint) -> Result<f64> {
    let n = floor_log(value, base)?;
    let lower = n as f64;
    if pow(base, n) == *value {
        return Ok(lower);
    }
    let raw = ln(value) / ln(base);
    Ok(raw.clamp(lower, (lower + 1.0).next_down()))
}

/// Natural logarithm of a positive big integer.
pub(crate) fn ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` as a float for `0 <= num < den`, keeping the 64 most
/// significant bits of the denominator so large operands do not overflow.
pub(crate) fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    let bits = den.bits();
    if bits <= 1000 {
        return num.to_f64().unwrap_or(0.0) / den.to_f64().unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let n = (num >> shift).to_f64().unwrap_or(0.0);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}
