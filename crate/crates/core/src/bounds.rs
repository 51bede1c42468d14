//! Exponent bounds and localization conditions for van der Waerden numbers.
//!
//! Strict inequalities such as `n > log(x)/log(r) - 1` are resolved as
//! "least integer `n` with `r^(n+1) > x`" on exact integers, so boundary
//! cases never depend on floating-point rounding. Floats only appear in
//! the logarithm decomposition and the root envelope, which are
//! descriptive.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radix::{self, PowerInterval, RadixExpansion};

/// `log_base(value) = n + eps1 + eps2` with `eps1 = log_base(b_n)` and
/// `eps2 = log_base(1 + tail / (b_n * base^n))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDecomposition {
    pub n: u64,
    pub eps1: f64,
    pub eps2: f64,
    pub total: f64,
}

pub fn decompose_log(expansion: &RadixExpansion) -> LogDecomposition {
    let base = expansion.base();
    let n = expansion.leading_exponent();
    let lead_digit = expansion.leading_digit();
    let ln_base = radix::ln(base);
    let below_one = 1f64.next_down();

    let eps1 = if lead_digit.is_one() {
        0.0
    } else {
        (radix::ln(lead_digit) / ln_base).min(below_one)
    };
    let lead = lead_digit * radix::pow(base, n);
    let tail = expansion.value() - &lead;
    let eps2 = if tail.is_zero() {
        0.0
    } else {
        let e = radix::ratio(&tail, &lead).ln_1p() / ln_base;
        e.min((below_one - eps1).max(0.0))
    };
    // value >= 1 and base >= 2 always hold for a constructed expansion
    let total = radix::delta(expansion.value(), base).unwrap_or(n as f64 + eps1 + eps2);
    LogDecomposition {
        n,
        eps1,
        eps2,
        total,
    }
}

/// Least `n >= 0` with `r^(n+1) > a + (k-1)d/2`; both sides are doubled
/// so the comparison stays on integers.
pub fn ap_lower_bound_n(a: &BigUint, d: &BigUint, k: u64, r: u64) -> Result<u64> {
    if k < 3 {
        return Err(Error::ProgressionTooShort(k, 3));
    }
    if d.is_zero() {
        return Err(Error::ZeroDifference);
    }
    if a.is_zero() {
        return Err(Error::InvalidArgument("progression start must be at least 1".into()));
    }
    if r < 2 {
        return Err(Error::BaseTooSmall(BigUint::from(r)));
    }
    let doubled_threshold = a * 2u32 + d * (k - 1);
    let base = BigUint::from(r);
    let mut doubled_power = &base * 2u32;
    let mut n = 0u64;
    while doubled_power <= doubled_threshold {
        doubled_power *= &base;
        n += 1;
    }
    Ok(n)
}

/// Largest `d` with `a + (k-1)d <= w`.
pub fn max_common_difference(w: &BigUint, a: &BigUint, k: u64) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::ProgressionTooShort(k, 2));
    }
    if a.is_zero() {
        return Err(Error::InvalidArgument("progression start must be at least 1".into()));
    }
    if a > w {
        return Err(Error::StartExceedsBound {
            start: a.clone(),
            bound: w.clone(),
        });
    }
    Ok((w - a) / (k - 1))
}

/// Least `n` with `r^(n+1) > k^m`.
pub fn cross_base_lower_bound(m: u64, k: u64, r: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument("exponent m must be at least 1".into()));
    }
    if k < 2 {
        return Err(Error::ProgressionTooShort(k, 2));
    }
    if r < 2 {
        return Err(Error::BaseTooSmall(BigUint::from(r)));
    }
    let target = radix::pow(&BigUint::from(k), m);
    let base = BigUint::from(r);
    let mut power = base.clone();
    let mut n = 0u64;
    while power <= target {
        power *= &base;
        n += 1;
    }
    Ok(n)
}

/// Smallest exponent any `W > w_lower` can have in base `base`.
///
/// `W > L` means `W >= L + 1`, so this is `floor_log(L + 1)`: equal to
/// `floor_log(L)` except when `L + 1` is itself a power of the base.
pub fn exponent_lower_bound(w_lower: &BigUint, base: &BigUint) -> Result<u64> {
    if w_lower.is_zero() {
        return Err(Error::ZeroValue);
    }
    radix::floor_log(&(w_lower + 1u32), base)
}

pub use exponent_lower_bound as exponent_floor_from_lower_bound;

/// Outcome of the `W < r^(k^2)` localization condition for one value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCondition", into = "RawCondition")]
pub struct ConditionReport {
    pub r: u64,
    pub k: u64,
    pub n: u64,
    pub w: BigUint,
    pub k_ge_sqrt_n_plus_1: bool,
    pub n_le_k2_minus_1: bool,
    pub w_lt_r_pow_k2: bool,
}

#[derive(Serialize, Deserialize)]
struct RawCondition {
    r: u64,
    k: u64,
    n: u64,
    #[serde(with = "crate::decimal")]
    w: BigUint,
    k_ge_sqrt_n_plus_1: bool,
    n_le_k2_minus_1: bool,
    w_lt_r_pow_k2: bool,
}

impl From<ConditionReport> for RawCondition {
    fn from(c: ConditionReport) -> Self {
        RawCondition {
            r: c.r,
            k: c.k,
            n: c.n,
            w: c.w,
            k_ge_sqrt_n_plus_1: c.k_ge_sqrt_n_plus_1,
            n_le_k2_minus_1: c.n_le_k2_minus_1,
            w_lt_r_pow_k2: c.w_lt_r_pow_k2,
        }
    }
}

impl TryFrom<RawCondition> for ConditionReport {
    type Error = Error;

    fn try_from(raw: RawCondition) -> Result<Self> {
        let report = check_square_condition(&raw.w, raw.r, raw.k)?;
        let claimed = ConditionReport {
            r: raw.r,
            k: raw.k,
            n: raw.n,
            w: raw.w,
            k_ge_sqrt_n_plus_1: raw.k_ge_sqrt_n_plus_1,
            n_le_k2_minus_1: raw.n_le_k2_minus_1,
            w_lt_r_pow_k2: raw.w_lt_r_pow_k2,
        };
        if claimed != report {
            return Err(Error::InvalidArgument(
                "condition report does not match its recomputation".into(),
            ));
        }
        Ok(report)
    }
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.k_ge_sqrt_n_plus_1 && self.n_le_k2_minus_1 && self.w_lt_r_pow_k2
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r={} k={} w={} n={} k>=sqrt(n+1)={} n<=k^2-1={} w<r^(k^2)={}",
            self.r,
            self.k,
            self.w,
            self.n,
            self.k_ge_sqrt_n_plus_1,
            self.n_le_k2_minus_1,
            self.w_lt_r_pow_k2
        )
    }
}

/// Exact `w < r^e`, materializing the power only when bit lengths cannot
/// decide.
fn lt_power(w: &BigUint, r: u64, e: u64) -> bool {
    let base = BigUint::from(r);
    let rb = base.bits();
    let wb = w.bits();
    // 2^(e(rb-1)) <= r^e < 2^(e*rb)
    if let Some(lo) = e.checked_mul(rb - 1) {
        if wb <= lo {
            return true;
        }
    }
    match e.checked_mul(rb) {
        Some(hi) if wb > hi => false,
        _ => *w < radix::pow(&base, e),
    }
}

pub fn check_square_condition(w: &BigUint, r: u64, k: u64) -> Result<ConditionReport> {
    if k < 2 {
        return Err(Error::ProgressionTooShort(k, 2));
    }
    let n = radix::floor_log(w, &BigUint::from(r))?;
    let k2 = k
        .checked_mul(k)
        .ok_or_else(|| Error::InvalidArgument(format!("k = {k} is too large")))?;
    let k_ge_sqrt_n_plus_1 = n.checked_add(1).is_some_and(|m| m <= k2);
    let n_le_k2_minus_1 = n < k2;
    debug_assert_eq!(k_ge_sqrt_n_plus_1, n_le_k2_minus_1);
    Ok(ConditionReport {
        r,
        k,
        n,
        w: w.clone(),
        k_ge_sqrt_n_plus_1,
        n_le_k2_minus_1,
        w_lt_r_pow_k2: lt_power(w, r, k2),
    })
}

/// `base <= value^(1/n) < base * ((n+1) b_n)^(1/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootEnvelope {
    pub n: u64,
    pub lower: f64,
    pub root: f64,
    pub upper: f64,
}

/// `value^(1/n)` for an arbitrary `n >= 1`.
pub fn nth_root(value: &BigUint, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroExponent);
    }
    if value.is_zero() {
        return Err(Error::ZeroValue);
    }
    let root = value.nth_root(n.min(u32::MAX as u64) as u32);
    if n <= u32::MAX as u64 && radix::pow(&root, n) == *value {
        if let Some(exact) = root.to_f64() {
            return Ok(exact);
        }
    }
    Ok((radix::ln(value) / n as f64).exp())
}

pub fn nth_root_envelope(expansion: &RadixExpansion) -> Result<RootEnvelope> {
    let n = expansion.leading_exponent();
    if n == 0 {
        return Err(Error::ZeroExponent);
    }
    let base = radix::ln(expansion.base()).exp();
    let lower = expansion.base().to_f64().unwrap_or(base);
    let root = nth_root(expansion.value(), n)?.max(lower);
    let factor = ((n + 1) as f64).ln() + radix::ln(expansion.leading_digit());
    let upper = lower * (factor / n as f64).exp();
    Ok(RootEnvelope {
        n,
        lower,
        root: root.min(upper.next_down()),
        upper,
    })
}

/// Consecutive power intervals `[base^e, base^(e+1))` for `e` in
/// `n_min..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow", into = "RawWindow")]
pub struct CandidateWindow {
    pub base: BigUint,
    pub n_min: u64,
    pub n_max: u64,
    pub intervals: Vec<PowerInterval>,
    pub global_lower: BigUint,
    pub global_upper: BigUint,
}

#[derive(Serialize, Deserialize)]
struct RawWindow {
    #[serde(with = "crate::decimal")]
    base: BigUint,
    n_min: u64,
    n_max: u64,
    intervals: Vec<PowerInterval>,
    #[serde(with = "crate::decimal")]
    global_lower: BigUint,
    #[serde(with = "crate::decimal")]
    global_upper: BigUint,
}

impl From<CandidateWindow> for RawWindow {
    fn from(w: CandidateWindow) -> Self {
        RawWindow {
            base: w.base,
            n_min: w.n_min,
            n_max: w.n_max,
            intervals: w.intervals,
            global_lower: w.global_lower,
            global_upper: w.global_upper,
        }
    }
}

impl TryFrom<RawWindow> for CandidateWindow {
    type Error = Error;

    fn try_from(raw: RawWindow) -> Result<Self> {
        let w = enumerate_candidate_intervals(&raw.base, raw.n_min, raw.n_max)?;
        if w.intervals != raw.intervals
            || w.global_lower != raw.global_lower
            || w.global_upper != raw.global_upper
        {
            return Err(Error::InvalidArgument(
                "window does not match its recomputation".into(),
            ));
        }
        Ok(w)
    }
}

impl CandidateWindow {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, value: &BigUint) -> bool {
        &self.global_lower <= value && value < &self.global_upper
    }
}

pub fn enumerate_candidate_intervals(
    base: &BigUint,
    n_min: u64,
    n_max: u64,
) -> Result<CandidateWindow> {
    if *base < BigUint::from(2u32) {
        return Err(Error::BaseTooSmall(base.clone()));
    }
    if n_min > n_max {
        return Err(Error::EmptyRange(n_min, n_max));
    }
    let mut intervals = Vec::with_capacity((n_max - n_min + 1) as usize);
    let mut lower = radix::pow(base, n_min);
    let global_lower = lower.clone();
    for e in n_min..=n_max {
        let interval = PowerInterval::new(base.clone(), e);
        debug_assert_eq!(interval.lower(), &lower);
        lower = interval.upper().clone();
        intervals.push(interval);
    }
    Ok(CandidateWindow {
        base: base.clone(),
        n_min,
        n_max,
        intervals,
        global_lower,
        global_upper: lower,
    })
}

/// Checks that "the exponent of `probe` lies in `[n_low, n_high]`" and
/// "`probe` lies in `[base^n_low, base^(n_high+1))`" agree. Always true;
/// property tests use it as a self-check.
pub fn candidate_interval_equivalence(
    n_low: u64,
    n_high: u64,
    base: &BigUint,
    probe: &BigUint,
) -> Result<bool> {
    if n_low > n_high {
        return Err(Error::EmptyRange(n_low, n_high));
    }
    let e = radix::floor_log(probe, base)?;
    let by_exponent = (n_low..=n_high).contains(&e);
    let by_interval = radix::pow(base, n_low) <= *probe && *probe < radix::pow(base, n_high + 1);
    Ok(by_exponent == by_interval)
}

/// The window forced on `W` by a strict lower bound `W > lower_bound`
/// together with `W < base^(k^2)`: exponents from
/// `exponent_lower_bound(lower_bound)` through `k^2 - 1`.
pub fn conditional_window(lower_bound: &BigUint, base: &BigUint, k: u64) -> Result<CandidateWindow> {
    let n_min = exponent_lower_bound(lower_bound, base)?;
    let n_max = k
        .checked_mul(k)
        .ok_or_else(|| Error::InvalidArgument(format!("k = {k} is too large")))?
        - 1;
    enumerate_candidate_intervals(base, n_min, n_max)
}

/// Published lower bound `W(2,7) > 3703`.
pub const W27_LOWER_BOUND: u64 = 3703;

/// Candidate exponent intervals for `W(2,7)` given `W(2,7) > 3703`, up to
/// exponent `n_max` (48 when `W(2,7) < 2^49` is assumed).
pub fn w27_window(n_max: u64) -> Result<CandidateWindow> {
    let base = BigUint::from(2u32);
    let n_min = exponent_lower_bound(&BigUint::from(W27_LOWER_BOUND), &base)?;
    enumerate_candidate_intervals(&base, n_min, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radix::expand;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_log(&expand(1132u32, 2u32).unwrap());
        assert_eq!(d.n, 10);
        assert_eq!(d.eps1, 0.0);
        let eps2 = (1132f64 / 1024.0).log2();
        assert!((d.eps2 - eps2).abs() < 1e-12);
        assert!((d.total - 10.144658).abs() < 1e-6);

        let d = decompose_log(&expand(27u32, 3u32).unwrap());
        assert_eq!((d.n, d.eps1, d.eps2, d.total), (3, 0.0, 0.0, 3.0));

        let d = decompose_log(&expand(1132u32, 6u32).unwrap());
        assert_eq!(d.n, 3);
        assert!((d.eps1 - 5f64.ln() / 6f64.ln()).abs() < 1e-12);
        assert!((d.eps2 - (1132f64 / 1080.0).ln() / 6f64.ln()).abs() < 1e-12);
        assert!((d.total - 1132f64.ln() / 6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ap_bound_examples() {
        assert_eq!(ap_lower_bound_n(&big(1), &big(2), 7, 2).unwrap(), 2);
        assert_eq!(ap_lower_bound_n(&big(1), &big(1), 3, 2).unwrap(), 1);
        assert_eq!(ap_lower_bound_n(&big(3697), &big(1), 7, 2).unwrap(), 11);
        assert_eq!(
            ap_lower_bound_n(&big(1), &big(1), 2, 2),
            Err(Error::ProgressionTooShort(2, 3))
        );
        assert_eq!(
            ap_lower_bound_n(&big(1), &big(0), 3, 2),
            Err(Error::ZeroDifference)
        );
    }

    #[test]
    fn common_difference_examples() {
        assert_eq!(max_common_difference(&big(9), &big(1), 3).unwrap(), big(4));
        assert_eq!(max_common_difference(&big(50), &big(50), 5).unwrap(), big(0));
        assert_eq!(
            max_common_difference(&big(3703), &big(1), 7).unwrap(),
            big(617)
        );
        assert!(matches!(
            max_common_difference(&big(3), &big(4), 3),
            Err(Error::StartExceedsBound { .. })
        ));
    }

    #[test]
    fn cross_base_examples() {
        assert_eq!(cross_base_lower_bound(3, 6, 2).unwrap(), 7);
        assert_eq!(cross_base_lower_bound(4, 7, 2).unwrap(), 11);
        for m in 1..20 {
            assert_eq!(cross_base_lower_bound(m, 5, 5).unwrap(), m);
        }
    }

    #[test]
    fn exponent_floor_examples() {
        assert_eq!(exponent_lower_bound(&big(3703), &big(2)).unwrap(), 11);
        assert_eq!(exponent_lower_bound(&big(3703), &big(7)).unwrap(), 4);
        // 15 + 1 = 2^4 is the boundary where floor_log(L) alone would say 3
        assert_eq!(exponent_lower_bound(&big(15), &big(2)).unwrap(), 4);
        assert_eq!(exponent_floor_from_lower_bound(&big(14), &big(2)).unwrap(), 3);
    }

    #[test]
    fn square_condition_examples() {
        let c = check_square_condition(&big(1132), 2, 6).unwrap();
        assert_eq!(c.n, 10);
        assert!(c.all_hold());
        let c = check_square_condition(&big(9), 2, 3).unwrap();
        assert_eq!(c.n, 3);
        assert!(c.all_hold());
        let w = radix::pow(&big(2), 50);
        let c = check_square_condition(&w, 2, 7).unwrap();
        assert_eq!(c.n, 50);
        assert!(!c.k_ge_sqrt_n_plus_1 && !c.n_le_k2_minus_1 && !c.w_lt_r_pow_k2);
    }

    #[test]
    fn lt_power_matches_direct_power() {
        for r in 2..12u64 {
            for e in 0..30 {
                let p = radix::pow(&big(r), e);
                for delta in [0u32, 1] {
                    let below = if p >= big(delta as u64) { &p - delta } else { big(0) };
                    assert_eq!(lt_power(&below, r, e), below < p);
                    assert!(!lt_power(&(&p + delta), r, e));
                }
            }
        }
    }

    #[test]
    fn root_envelope_examples() {
        let root = nth_root(&big(3703), 12).unwrap();
        assert!((root - 1.983259).abs() < 1e-6, "{root}");
        assert_eq!(nth_root(&big(4096), 12).unwrap(), 2.0);

        let env = nth_root_envelope(&expand(27u32, 3u32).unwrap()).unwrap();
        assert_eq!(env.root, 3.0);
        assert_eq!(env.lower, 3.0);
        assert!((env.upper - 3.0 * 4f64.cbrt()).abs() < 1e-12);

        let env = nth_root_envelope(&expand(4096u32, 2u32).unwrap()).unwrap();
        assert_eq!(env.root, 2.0);
        assert!(matches!(
            nth_root_envelope(&expand(1u32, 2u32).unwrap()),
            Err(Error::ZeroExponent)
        ));
    }

    #[test]
    fn window_examples() {
        let two = big(2);
        let w = enumerate_candidate_intervals(&two, 11, 48).unwrap();
        assert_eq!(w.len(), 38);
        assert_eq!(w.global_lower, big(2048));
        assert_eq!(w.global_upper, big(562_949_953_421_312));
        assert_eq!(w.intervals[0].lower(), &big(2048));
        assert_eq!(w.intervals[0].upper(), &big(4096));
        assert_eq!(w.intervals[37].lower(), &radix::pow(&two, 48));

        let w = enumerate_candidate_intervals(&two, 11, 11).unwrap();
        assert_eq!(w.len(), 1);

        let w = enumerate_candidate_intervals(&two, 11, 15).unwrap();
        let ends: Vec<_> = w.intervals.iter().map(|i| i.exponent()).collect();
        assert_eq!(ends, [11, 12, 13, 14, 15]);
        assert_eq!(w.global_upper, big(65536));

        assert_eq!(
            enumerate_candidate_intervals(&two, 12, 11),
            Err(Error::EmptyRange(12, 11))
        );
        assert_eq!(w27_window(48).unwrap().len(), 38);
        assert_eq!(conditional_window(&big(3703), &two, 7).unwrap().len(), 38);
    }

    #[test]
    fn equivalence_examples() {
        let two = big(2);
        assert!(candidate_interval_equivalence(11, 15, &two, &big(3703)).unwrap());
        assert!(candidate_interval_equivalence(11, 15, &two, &big(65536)).unwrap());
        assert!(candidate_interval_equivalence(11, 15, &two, &big(65535)).unwrap());
        assert!(candidate_interval_equivalence(11, 15, &two, &big(2047)).unwrap());
    }
}
