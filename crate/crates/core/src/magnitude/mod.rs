//! Sound comparison of quantities too large to materialize.
//!
//! A [`Magnitude`] stores an interval `[lo, hi]` that provably contains
//! `log2^(k)(x)`, the base-2 logarithm applied `k = level` times to the
//! quantity `x`. Endpoints are [`Dyadic`] numbers rounded outward at
//! [`PREC`] bits. Level 0 values that fit the bit budget also carry the exact
//! integer.
//!
//! The stored level is canonical: a level `k >= 1` value below `2^53` is
//! lowered, and a value at or above `2^(2^53)` is raised.

pub mod dyadic;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::seqexpr::{EvalConfig, EvalError, Node, SequenceExpr};
pub use dyadic::{Dyadic, Round, PREC};

/// Highest number of iterated logarithms a magnitude may carry.
pub const MAX_LEVEL: u8 = 8;

// level k >= 1 values below 2^LOWER_BITS are lowered one level
const LOWER_BITS: i64 = 53;
// values whose upper endpoint has top bit beyond this are raised one level
const RAISE_TOP: i64 = 1 << 53;

/// Outcome of a sound comparison `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Certainty {
    ProvenBelow,
    ProvenAtOrAbove,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MagnitudeError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("magnitude exceeds {MAX_LEVEL} iterated logarithms")]
    LevelCap,
    #[error("cannot bound in log space: {0}")]
    Unsupported(String),
}

type MagResult = Result<Magnitude, MagnitudeError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Magnitude {
    level: u8,
    lo: Dyadic,
    hi: Dyadic,
    exact: Option<BigUint>,
}

enum RaiseFail {
    // the value drops to at most 1 at some level below the target
    TooSmall,
    Indeterminate,
}

fn unsupported(msg: &str) -> MagnitudeError {
    MagnitudeError::Unsupported(msg.to_string())
}

impl Magnitude {
    pub fn exact(v: BigUint) -> Magnitude {
        let d = Dyadic::from_biguint(&v);
        Magnitude {
            level: 0,
            lo: d.clone(),
            hi: d,
            exact: Some(v),
        }
    }

    pub fn from_u64(v: u64) -> Magnitude {
        Magnitude::exact(BigUint::from(v))
    }

    /// A level-0 magnitude bracketing `num / den` (both positive).
    pub fn from_ratio(num: &BigUint, den: &BigUint) -> Magnitude {
        let (n, d) = (BigInt::from(num.clone()), BigInt::from(den.clone()));
        Magnitude {
            level: 0,
            lo: Dyadic::from_ratio(&n, &d, Round::Down),
            hi: Dyadic::from_ratio(&n, &d, Round::Up),
            exact: None,
        }
    }

    /// Builds and normalizes a magnitude from raw level-`level` bounds.
    pub fn from_bounds(level: u8, lo: Dyadic, hi: Dyadic) -> MagResult {
        assert!(lo <= hi, "inverted magnitude interval");
        Magnitude {
            level,
            lo,
            hi,
            exact: None,
        }
        .normalize()
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn exact_value(&self) -> Option<&BigUint> {
        self.exact.as_ref()
    }

    /// True when `x` may be contained: `log2^(level)(x)` lies in `[lo, hi]`
    /// with `x` given at level 0.
    pub fn interval(&self) -> (&Dyadic, &Dyadic) {
        (&self.lo, &self.hi)
    }

    fn lvl(level: u8, lo: Dyadic, hi: Dyadic) -> Magnitude {
        Magnitude {
            level,
            lo,
            hi,
            exact: None,
        }
    }

    fn is_exact_one(&self) -> bool {
        self.exact.as_ref().is_some_and(|v| v.is_one())
    }

    fn is_exact_zero(&self) -> bool {
        self.exact.as_ref().is_some_and(|v| v.is_zero())
    }

    fn normalize(mut self) -> MagResult {
        loop {
            if self.level > MAX_LEVEL {
                return Err(MagnitudeError::LevelCap);
            }
            if self.hi.top().unwrap_or(0) > RAISE_TOP {
                if !self.lo.is_positive() {
                    return Err(unsupported("interval too wide to raise"));
                }
                self = Magnitude::lvl(self.level + 1, self.lo.log2(Round::Down), self.hi.log2(Round::Up));
                continue;
            }
            if self.level >= 1 && self.hi < Dyadic::pow2(LOWER_BITS) {
                self = Magnitude::lvl(self.level - 1, self.lo.exp2(Round::Down), self.hi.exp2(Round::Up));
                continue;
            }
            return Ok(self);
        }
    }

    fn raise_to(&self, target: u8) -> Result<(Dyadic, Dyadic), RaiseFail> {
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        for _ in self.level..target {
            if hi <= Dyadic::one() {
                return Err(RaiseFail::TooSmall);
            }
            if !lo.is_positive() {
                return Err(RaiseFail::Indeterminate);
            }
            lo = lo.log2(Round::Down);
            hi = hi.log2(Round::Up);
        }
        Ok((lo, hi))
    }

    /// `log2(self)`, as a magnitude that may be non-positive at level 0.
    pub fn log2(&self) -> MagResult {
        if self.level >= 1 {
            return Magnitude::lvl(self.level - 1, self.lo.clone(), self.hi.clone()).normalize();
        }
        if !self.lo.is_positive() {
            return Err(unsupported("logarithm of a value that may be non-positive"));
        }
        if let Some(v) = &self.exact {
            if v.is_one() {
                return Ok(Magnitude::exact(BigUint::zero()));
            }
            if (v - 1u32) & v == BigUint::zero() {
                return Ok(Magnitude::from_u64(v.bits() - 1));
            }
        }
        Magnitude::lvl(0, self.lo.log2(Round::Down), self.hi.log2(Round::Up)).normalize()
    }

    /// `2^self`.
    pub fn exp2(&self, cfg: &EvalConfig) -> MagResult {
        if let Some(k) = &self.exact {
            if let Some(k) = k.to_u64().filter(|k| *k < cfg.bit_budget) {
                return Ok(Magnitude::exact(BigUint::one() << k));
            }
        }
        if self.level == 0 && self.hi < Dyadic::pow2(LOWER_BITS) {
            return Ok(Magnitude::lvl(0, self.lo.exp2(Round::Down), self.hi.exp2(Round::Up)));
        }
        if !self.lo.is_positive() {
            return Err(unsupported("exponent interval too wide"));
        }
        Magnitude::lvl(self.level + 1, self.lo.clone(), self.hi.clone()).normalize()
    }

    pub fn add(&self, other: &Magnitude, cfg: &EvalConfig) -> MagResult {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            let s = a + b;
            if s.bits() <= cfg.bit_budget {
                return Ok(Magnitude::exact(s));
            }
        }
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        if self.level == 0 && other.level == 0 {
            return Magnitude::lvl(
                0,
                self.lo.add(&other.lo, Round::Down),
                self.hi.add(&other.hi, Round::Up),
            )
            .normalize();
        }
        let (big, small) = if self.level >= other.level {
            (self, other)
        } else {
            (other, self)
        };
        if small.lo.is_negative() {
            return Err(unsupported("sum with a possibly negative operand"));
        }
        let level = big.level;
        // max(x, y) <= x + y <= 2 max(x, y)
        let (lo, hi) = match small.raise_to(level) {
            Ok((slo, shi)) => (big.lo.clone().max(slo), big.hi.clone().max(shi)),
            Err(RaiseFail::TooSmall) => (big.lo.clone(), big.hi.clone()),
            Err(RaiseFail::Indeterminate) => return Err(unsupported("sum operand interval too wide")),
        };
        Magnitude::lvl(level, lo, double_up(level, hi)).normalize()
    }

    pub fn mul(&self, other: &Magnitude, cfg: &EvalConfig) -> MagResult {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            if a.bits() + b.bits() <= cfg.bit_budget + 1 {
                let p = a * b;
                if p.bits() <= cfg.bit_budget {
                    return Ok(Magnitude::exact(p));
                }
            }
        }
        if self.is_exact_one() {
            return Ok(other.clone());
        }
        if other.is_exact_one() {
            return Ok(self.clone());
        }
        if self.level == 0 && other.level == 0 {
            if self.lo.is_negative() || other.lo.is_negative() {
                return Err(unsupported("product with a possibly negative operand"));
            }
            return Magnitude::lvl(
                0,
                self.lo.mul(&other.lo, Round::Down),
                self.hi.mul(&other.hi, Round::Up),
            )
            .normalize();
        }
        self.log2()?.add(&other.log2()?, cfg)?.exp2(cfg)
    }

    pub fn pow(&self, exp: &Magnitude, cfg: &EvalConfig) -> MagResult {
        if self.is_exact_one() || exp.is_exact_zero() {
            return Ok(Magnitude::from_u64(1));
        }
        if let (Some(a), Some(e)) = (&self.exact, &exp.exact) {
            match crate::seqexpr::pow_exact(a, e, cfg) {
                Ok(v) => return Ok(Magnitude::exact(v)),
                Err(EvalError::BitBudgetExceeded { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
        exp.mul(&self.log2()?, cfg)?.exp2(cfg)
    }

    /// `self - other`, when the difference can be certified positive.
    pub fn sub(&self, other: &Magnitude, cfg: &EvalConfig) -> MagResult {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return if a > b {
                Ok(Magnitude::exact(a - b))
            } else {
                Err(EvalError::NonPositiveValue(format!("{a} - {b}")).into())
            };
        }
        if self.level == 0 && other.level == 0 {
            let lo = self.lo.sub(&other.hi, Round::Down);
            if !lo.is_positive() {
                return Err(unsupported("difference not certified positive"));
            }
            return Magnitude::lvl(0, lo, self.hi.sub(&other.lo, Round::Up)).normalize();
        }
        // x - y >= x / 2 once 2y < x
        if compare(&other.mul(&Magnitude::from_u64(2), cfg)?, self) == Certainty::ProvenBelow {
            let lo = half_down(self.level, self.lo.clone());
            return Magnitude::lvl(self.level, lo, self.hi.clone()).normalize();
        }
        Err(unsupported("difference of comparable magnitudes"))
    }

    pub fn div(&self, other: &Magnitude) -> MagResult {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            let (q, r) = a.div_rem(b);
            return if !b.is_zero() && r.is_zero() {
                Ok(Magnitude::exact(q))
            } else {
                Err(EvalError::InexactDivision.into())
            };
        }
        if self.level == 0 && other.level == 0 && other.lo.is_positive() {
            return Magnitude::lvl(
                0,
                self.lo.div(&other.hi, Round::Down),
                self.hi.div(&other.lo, Round::Up),
            )
            .normalize();
        }
        Err(unsupported("quotient of large magnitudes"))
    }

    pub fn factorial(&self, cfg: &EvalConfig) -> MagResult {
        let k = self
            .exact
            .as_ref()
            .ok_or_else(|| unsupported("factorial of an inexact argument"))?;
        match crate::seqexpr::factorial_exact(k, cfg) {
            Ok(v) => return Ok(Magnitude::exact(v)),
            Err(EvalError::BitBudgetExceeded { .. }) => {}
            Err(e) => return Err(e.into()),
        }
        // k (log2 k - log2 e) <= log2 k! <= k log2 k
        let kd = Dyadic::from_biguint(k);
        let log2e_up = Dyadic::from_ratio(&BigInt::from(14427u32), &BigInt::from(10000u32), Round::Up);
        let lo = kd.mul(&kd.log2(Round::Down).sub(&log2e_up, Round::Down), Round::Down);
        let hi = kd.mul(&kd.log2(Round::Up), Round::Up);
        Magnitude::lvl(0, lo, hi).normalize()?.exp2(cfg)
    }
}

/// Upper bound for `log2^(level)(2x)` given `log2^(level)(x) <= hi`.
fn double_up(level: u8, hi: Dyadic) -> Dyadic {
    match level {
        0 => hi.mul_pow2(1),
        1 => hi.add(&Dyadic::one(), Round::Up),
        _ if hi >= Dyadic::from_i64(64) => hi.add(&Dyadic::pow2(-40), Round::Up),
        _ => double_up(level - 1, hi.exp2(Round::Up)).log2(Round::Up),
    }
}

/// Lower bound for `log2^(level)(x / 2)` given `log2^(level)(x) >= lo`.
fn half_down(level: u8, lo: Dyadic) -> Dyadic {
    match level {
        0 => lo.mul_pow2(-1),
        1 => lo.sub(&Dyadic::one(), Round::Down),
        _ if lo >= Dyadic::from_i64(64) => lo.sub(&Dyadic::pow2(-40), Round::Down),
        _ => {
            let below = half_down(level - 1, lo.exp2(Round::Down));
            if below.is_positive() {
                below.log2(Round::Down)
            } else {
                // x/2 <= 1 at the level below; fall back to the trivial bound
                Dyadic::from_i64(i64::MIN / 4)
            }
        }
    }
}

fn interval_compare(alo: &Dyadic, ahi: &Dyadic, blo: &Dyadic, bhi: &Dyadic) -> Certainty {
    if ahi < blo {
        Certainty::ProvenBelow
    } else if alo >= bhi {
        Certainty::ProvenAtOrAbove
    } else {
        Certainty::Unknown
    }
}

/// Sound tri-state answer to `lhs < rhs`.
pub fn compare(lhs: &Magnitude, rhs: &Magnitude) -> Certainty {
    if let (Some(a), Some(b)) = (&lhs.exact, &rhs.exact) {
        return if a < b {
            Certainty::ProvenBelow
        } else {
            Certainty::ProvenAtOrAbove
        };
    }
    compare_at_level(lhs, rhs, lhs.level.max(rhs.level))
}

/// Compares after raising both sides to `level` (at least the higher of the two).
pub fn compare_at_level(lhs: &Magnitude, rhs: &Magnitude, level: u8) -> Certainty {
    let level = level.max(lhs.level).max(rhs.level);
    if level > MAX_LEVEL + 1 {
        return Certainty::Unknown;
    }
    match (lhs.raise_to(level), rhs.raise_to(level)) {
        (Ok((alo, ahi)), Ok((blo, bhi))) => interval_compare(&alo, &ahi, &blo, &bhi),
        // the side that dropped to <= 1 is below anything with a positive
        // value at a strictly higher level
        (Err(RaiseFail::TooSmall), Ok((blo, _))) if rhs.level > lhs.level && blo.is_positive() => {
            Certainty::ProvenBelow
        }
        (Ok((alo, _)), Err(RaiseFail::TooSmall)) if lhs.level > rhs.level && alo.is_positive() => {
            Certainty::ProvenAtOrAbove
        }
        _ => Certainty::Unknown,
    }
}

/// Decides `num / den < 1/2`, i.e. `2 num < den`.
pub fn ratio_below_half(num: &Magnitude, den: &Magnitude, cfg: &EvalConfig) -> Certainty {
    match num.mul(&Magnitude::from_u64(2), cfg) {
        Ok(twice) => compare(&twice, den),
        Err(_) => Certainty::Unknown,
    }
}

/// Magnitude of `expr` at index `n`: exact when within the bit budget,
/// otherwise a certified log-space enclosure.
pub fn magnitude_of(expr: &SequenceExpr, n: u64, cfg: &EvalConfig) -> MagResult {
    let m = node_magnitude(expr.root(), n, cfg)?;
    if m.is_exact_zero() {
        return Err(EvalError::NonPositiveValue("expression evaluates to 0".into()).into());
    }
    Ok(m)
}

fn node_magnitude(node: &Node, n: u64, cfg: &EvalConfig) -> MagResult {
    let rec = |x: &Node| node_magnitude(x, n, cfg);
    match node {
        Node::Int(v) => Ok(Magnitude::exact(v.clone())),
        Node::Index => Ok(Magnitude::from_u64(n)),
        Node::Arg => Err(EvalError::UnboundArg.into()),
        Node::Add(l, r) => rec(l)?.add(&rec(r)?, cfg),
        Node::Sub(l, r) => rec(l)?.sub(&rec(r)?, cfg),
        Node::Mul(l, r) => rec(l)?.mul(&rec(r)?, cfg),
        Node::Div(l, r) => rec(l)?.div(&rec(r)?),
        Node::Pow(l, r) => rec(l)?.pow(&rec(r)?, cfg),
        Node::Factorial(x) => rec(x)?.factorial(cfg),
        Node::NthPrime(x) => {
            let k = rec(x)?;
            let k = k.exact.ok_or_else(|| {
                MagnitudeError::Eval(EvalError::PrimeCeilingExceeded {
                    index: "(beyond exact range)".into(),
                    ceiling: cfg.prime_ceiling,
                })
            })?;
            Ok(Magnitude::exact(crate::seqexpr::nth_prime_exact(&k, cfg)?))
        }
        Node::Tower { base, height, top } => {
            let base = rec(base)?;
            let height = rec(height)?;
            let height = height
                .exact
                .as_ref()
                .and_then(|h| h.to_u64())
                .ok_or_else(|| unsupported("tower height must be a small exact integer"))?;
            if height == 0 {
                return Err(EvalError::InvalidTowerHeight.into());
            }
            let mut f = rec(top)?;
            if base.is_exact_one() && height > 1 {
                return Ok(Magnitude::from_u64(1));
            }
            for _ in 1..height {
                f = base.pow(&f, cfg)?;
            }
            Ok(f)
        }
    }
}

#[cfg(test)]
mod tests;
