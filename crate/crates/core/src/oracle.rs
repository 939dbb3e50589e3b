//! Brute-force cross-checks kept apart from the main summation and
//! enclosure code: a direct fraction fold, continued-fraction convergents,
//! fixed-point decimal digits and approximation-witness checks.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::criteria::GrowthFn;
use crate::seqexpr::{EvalConfig, EvalError};
use crate::series::{Enclosure, SeriesSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("enclosure is too wide to decide")]
    IndeterminateWidth,
    #[error("index {0} is below the first index")]
    BelowStart(u64),
}

/// `Σ_{n=start}^{last} ±a_n/b_n` as a reduced fraction, folded with plain
/// integer cross-multiplication.
pub fn brute_sum(spec: &SeriesSpec, last: u64, cfg: &EvalConfig) -> Result<BigRational, OracleError> {
    if last < spec.start_index {
        return Err(OracleError::BelowStart(last));
    }
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for n in spec.start_index..=last {
        let a = BigInt::from(spec.numer.eval(n, cfg)?);
        let b = BigInt::from(spec.denom.eval(n, cfg)?);
        let a = if spec.is_negative_at(n) { -a } else { a };
        num = num * &b + a * &den;
        den *= b;
        let g = num.gcd(&den);
        if !g.is_one() && !g.is_zero() {
            num /= &g;
            den /= &g;
        }
    }
    Ok(BigRational::new(num, den))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub p: BigInt,
    pub q: BigUint,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), BigInt::from(self.q.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergents {
    pub terms: Vec<BigInt>,
    pub convergents: Vec<Convergent>,
    /// Fewer than the requested number of terms are certified.
    pub truncated: bool,
}

/// Continued-fraction convergents shared by every value in the enclosure.
///
/// A partial quotient is kept only while both endpoints have the same one
/// and neither expansion ends there, so every reported convergent belongs to
/// the enclosed value. When both endpoints are the same rational, its full
/// (finite) expansion is reported.
pub fn convergents(enc: &Enclosure, count: usize) -> Convergents {
    let split = |v: &BigRational| (v.numer().clone(), v.denom().clone());
    let (mut ln, mut ld) = split(&enc.lo.0);
    let (mut hn, mut hd) = split(&enc.hi.0);
    let mut terms = Vec::new();
    let mut truncated = true;
    while terms.len() < count {
        let (a, lr) = ln.div_mod_floor(&ld);
        let (b, hr) = hn.div_mod_floor(&hd);
        if a != b {
            break;
        }
        match (lr.is_zero(), hr.is_zero()) {
            (true, true) => {
                // identical endpoints; the expansion ends here
                terms.push(a);
                truncated = false;
                break;
            }
            (false, false) => {
                terms.push(a);
                (ln, ld) = (ld, lr);
                (hn, hd) = (hd, hr);
            }
            _ => break,
        }
    }
    if terms.len() == count {
        truncated = false;
    }
    let mut out = Vec::with_capacity(terms.len());
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (terms.first().cloned().unwrap_or_default(), BigInt::one());
    for (i, a) in terms.iter().enumerate() {
        if i > 0 {
            let p2 = a * &p1 + &p0;
            let q2 = a * &q1 + &q0;
            (p0, q0) = (p1, q1);
            (p1, q1) = (p2, q2);
        }
        out.push(Convergent {
            index: i,
            p: p1.clone(),
            q: q1.to_biguint().expect("denominators are positive"),
        });
    }
    Convergents {
        terms,
        convergents: out,
        truncated,
    }
}

/// Decides `|θ - p/q| < 1/f(q)` for every `θ` in the enclosure.
pub fn verify_witness(
    enc: &Enclosure,
    p: &BigInt,
    q: &BigUint,
    f: &GrowthFn,
    n: u64,
    cfg: &EvalConfig,
) -> Result<bool, OracleError> {
    let fq = f.at(n, q, cfg)?;
    let bound = BigRational::new(BigInt::one(), BigInt::from(fq));
    let x = BigRational::new(p.clone(), BigInt::from(q.clone()));
    let (lo, hi) = (&enc.lo.0, &enc.hi.0);
    let far = (lo - &x).abs().max((hi - &x).abs());
    if far < bound {
        return Ok(true);
    }
    let near = if *lo <= x && x <= *hi {
        BigRational::zero()
    } else {
        (lo - &x).abs().min((hi - &x).abs())
    };
    if near >= bound {
        return Ok(false);
    }
    Err(OracleError::IndeterminateWidth)
}

const GUARD_DIGITS: u32 = 12;

/// `digits` decimal places of `Σ_{n<=last} c_n`, computed by summing
/// `floor(10^k c_n)` with `GUARD_DIGITS` extra places. The caller picks
/// `last` so that the omitted tail is far below `10^-digits`.
pub fn fixed_point_digits(spec: &SeriesSpec, last: u64, digits: u32, cfg: &EvalConfig) -> Result<String, OracleError> {
    if last < spec.start_index {
        return Err(OracleError::BelowStart(last));
    }
    let scale = BigInt::from(10).pow(digits + GUARD_DIGITS);
    let mut total = BigInt::zero();
    for n in spec.start_index..=last {
        let a = BigInt::from(spec.numer.eval(n, cfg)?);
        let b = BigInt::from(spec.denom.eval(n, cfg)?);
        let t = (a * &scale).div_floor(&b);
        if spec.is_negative_at(n) {
            total -= t;
        } else {
            total += t;
        }
    }
    // each floor loses less than one unit
    let slack = BigInt::from(last - spec.start_index + 2);
    let guard = BigInt::from(10).pow(GUARD_DIGITS);
    let low = (&total - &slack).div_floor(&guard);
    let high = (&total + &slack).div_floor(&guard);
    if low != high || low.sign() == Sign::Minus {
        return Err(OracleError::IndeterminateWidth);
    }
    let s = low.to_string();
    let s = if s.len() <= digits as usize {
        format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s)
    } else {
        s
    };
    let split = s.len() - digits as usize;
    Ok(if digits == 0 {
        s
    } else {
        format!("{}.{}", &s[..split], &s[split..])
    })
}
