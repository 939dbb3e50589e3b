//! Binary floating-point numbers `m · 2^e` with arbitrary-size mantissa and
//! explicitly directed rounding. Used as interval endpoints.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Working precision in mantissa bits.
pub const PREC: u64 = 128;

// fixed-point width used inside log2/exp2
const WORK: u64 = PREC + 40;
// fraction bits produced by log2/exp2
const FRAC_BITS: u64 = PREC + 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// The value `mant · 2^exp`, with `mant` odd (or zero with `exp == 0`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn floor_shr(m: &BigInt, s: u64) -> BigInt {
    m.div_floor(&(BigInt::one() << s))
}

fn ceil_shr(m: &BigInt, s: u64) -> BigInt {
    -floor_shr(&-m, s)
}

fn shr_dir(m: &BigInt, s: u64, dir: Round) -> BigInt {
    match dir {
        Round::Down => floor_shr(m, s),
        Round::Up => ceil_shr(m, s),
    }
}

fn ushr_dir(m: &BigUint, s: u64, dir: Round) -> BigUint {
    let q = m >> s;
    match dir {
        Round::Up if (&q << s) != *m => q + 1u32,
        _ => q,
    }
}

fn isqrt_dir(x: &BigUint, dir: Round) -> BigUint {
    let s = x.sqrt();
    match dir {
        Round::Up if &s * &s != *x => s + 1u32,
        _ => s,
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Dyadic {
        if mant.is_zero() {
            return Dyadic::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        Dyadic {
            mant: mant >> tz,
            exp: exp + tz as i64,
        }
    }

    pub fn zero() -> Dyadic {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Dyadic {
        Dyadic::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Dyadic {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_biguint(v: &BigUint) -> Dyadic {
        Dyadic::new(BigInt::from(v.clone()), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Dyadic {
        Dyadic {
            mant: BigInt::one(),
            exp: k,
        }
    }

    /// Nearest dyadic to `num / den` in direction `dir`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, dir: Round) -> Dyadic {
        Dyadic::new(num.clone(), 0).div(&Dyadic::new(den.clone(), 0), dir)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Smallest `t` with `|self| < 2^t`; `None` for zero.
    pub fn top(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64)
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn round(&self, prec: u64, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec {
            return self.clone();
        }
        let s = bits - prec;
        Dyadic::new(shr_dir(&self.mant, s, dir), self.exp + s as i64)
    }

    fn add_exact(&self, other: &Dyadic) -> Dyadic {
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn add(&self, other: &Dyadic, dir: Round) -> Dyadic {
        let (ta, tb) = match (self.top(), other.top()) {
            (None, _) => return other.round(PREC, dir),
            (_, None) => return self.round(PREC, dir),
            (Some(a), Some(b)) => (a, b),
        };
        let (big, small, tbig, tsmall) = if ta >= tb {
            (self, other, ta, tb)
        } else {
            (other, self, tb, ta)
        };
        let gap = PREC as i64 + 8;
        if tbig - tsmall > gap {
            // The small operand lies far below the rounding unit; stand in a
            // same-signed value of larger modulus that still sits below it.
            let big = big.round(PREC, dir);
            let stand_in = Dyadic::pow2(tbig - gap);
            let stand_in = if small.is_negative() { stand_in.neg() } else { stand_in };
            return big.add_exact(&stand_in).round(PREC, dir);
        }
        big.add_exact(small).round(PREC, dir)
    }

    pub fn sub(&self, other: &Dyadic, dir: Round) -> Dyadic {
        self.add(&other.neg(), dir)
    }

    pub fn mul(&self, other: &Dyadic, dir: Round) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp).round(PREC, dir)
    }

    pub fn div(&self, other: &Dyadic, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "division by zero");
        let k = PREC + other.mant.bits() + 2;
        let num = &self.mant << k;
        let q = match dir {
            Round::Down => num.div_floor(&other.mant),
            Round::Up => -((-num).div_floor(&other.mant)),
        };
        Dyadic::new(q, self.exp - other.exp - k as i64).round(PREC, dir)
    }

    /// Greatest integer not above the value.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            floor_shr(&self.mant, (-self.exp) as u64)
        }
    }

    /// Approximate conversion for display; saturates to ±inf.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let shift = bits.saturating_sub(60);
        let head = (&self.mant >> shift).to_f64().unwrap_or(0.0);
        let e = self.exp.saturating_add(shift as i64);
        if e > 2000 {
            return head.signum() * f64::INFINITY;
        }
        if e < -2000 {
            return 0.0;
        }
        head * 2f64.powi(e as i32)
    }

    /// Directed-rounded `log2(self)`; requires `self > 0`.
    pub fn log2(&self, dir: Round) -> Dyadic {
        assert!(self.is_positive(), "log2 of non-positive value");
        let m = self.mant.magnitude();
        let b = m.bits();
        let int_part = self.exp + b as i64 - 1;
        // y = m / 2^(b-1) in [1, 2), held with WORK fraction bits
        let mut y = if b - 1 <= WORK {
            m << (WORK - (b - 1))
        } else {
            ushr_dir(m, b - 1 - WORK, dir)
        };
        let two = BigUint::one() << (WORK + 1);
        let mut frac = BigUint::zero();
        for _ in 0..FRAC_BITS {
            y = ushr_dir(&(&y * &y), WORK, dir);
            frac <<= 1;
            if y >= two {
                frac += 1u32;
                y = ushr_dir(&y, 1, dir);
            }
        }
        if dir == Round::Up {
            frac += 1u32;
        }
        let total = (BigInt::from(int_part) << FRAC_BITS) + BigInt::from(frac);
        Dyadic::new(total, -(FRAC_BITS as i64)).round(PREC, dir)
    }

    /// Directed-rounded `2^self`. The integer part of `self` must fit an `i64`.
    pub fn exp2(&self, dir: Round) -> Dyadic {
        if self.exp >= 0 {
            let k = self.floor().to_i64().expect("exp2 argument out of range");
            return Dyadic::pow2(k);
        }
        let s = (-self.exp) as u64;
        let mut k = floor_shr(&self.mant, s).to_i64().expect("exp2 argument out of range");
        let frac_num = self.mant.mod_floor(&(BigInt::one() << s));
        let frac_num = frac_num.to_biguint().expect("non-negative remainder");
        let mut f = if s <= FRAC_BITS {
            frac_num << (FRAC_BITS - s)
        } else {
            ushr_dir(&frac_num, s - FRAC_BITS, dir)
        };
        if f.bits() > FRAC_BITS {
            k += 1;
            f = BigUint::zero();
        }
        let table = root_table();
        let roots = match dir {
            Round::Down => &table.0,
            Round::Up => &table.1,
        };
        let mut acc = BigUint::one() << WORK;
        for i in 1..=FRAC_BITS {
            if f.bit(FRAC_BITS - i) {
                acc = ushr_dir(&(&acc * &roots[(i - 1) as usize]), WORK, dir);
            }
        }
        Dyadic::new(BigInt::from(acc), k - WORK as i64).round(PREC, dir)
    }
}

// 2^(2^-i) for i = 1..=FRAC_BITS as WORK-bit fixed point, lower and upper bounds.
fn root_table() -> &'static (Vec<BigUint>, Vec<BigUint>) {
    static TABLE: OnceLock<(Vec<BigUint>, Vec<BigUint>)> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut lo = Vec::with_capacity(FRAC_BITS as usize);
        let mut hi = Vec::with_capacity(FRAC_BITS as usize);
        let two = BigUint::from(2u32) << (2 * WORK);
        let (mut l, mut h) = (isqrt_dir(&two, Round::Down), isqrt_dir(&two, Round::Up));
        for _ in 0..FRAC_BITS {
            lo.push(l.clone());
            hi.push(h.clone());
            l = isqrt_dir(&(&l << WORK), Round::Down);
            h = isqrt_dir(&(&h << WORK), Round::Up);
        }
        (lo, hi)
    })
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb {
            let rank = |s: Sign| match s {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            };
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let (ta, tb) = (self.top().unwrap(), other.top().unwrap());
        if ta != tb {
            let ord = ta.cmp(&tb);
            return if sa == Sign::Plus { ord } else { ord.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{} (~{:e})", self.mant, self.exp, self.to_f64())
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if v.is_finite() {
            write!(f, "{v:e}")
        } else {
            write!(f, "~2^{}", self.top().unwrap_or(0))
        }
    }
}
