//! Exact rational helpers and the `"p/q"` text form used in reports.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    let (n, d) = (BigInt::from(num.clone()), BigInt::from(den.clone()));
    // skip the gcd when the fraction is already in lowest terms
    if num.is_one() || den.is_one() {
        BigRational::new_raw(n, d)
    } else {
        BigRational::new(n, d)
    }
}

pub fn from_u64(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// `10^-digits`.
pub fn ten_pow_neg(digits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10).pow(digits))
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int = if int.is_empty() || int == "-" {
            "0"
        } else {
            int.trim_start_matches('-')
        };
        let whole = BigInt::from_str(&format!("{int}{frac}")).ok()?;
        let v = BigRational::new(whole, BigInt::from(10).pow(frac.len() as u32));
        return Some(if negative { -v } else { v });
    }
    BigInt::from_str(t).ok().map(BigRational::from_integer)
}

/// An exact rational that serializes as the string `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub BigRational);

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl From<BigRational> for Q {
    fn from(v: BigRational) -> Self {
        Q(v)
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text)
            .map(Q)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid rational {text:?}")))
    }
}

/// Short human form: the fraction when small, otherwise a size summary.
pub fn describe(v: &BigRational) -> String {
    let (n, d) = (v.numer(), v.denom());
    if n.bits() + d.bits() <= 160 {
        if d.is_one() {
            return n.to_string();
        }
        return format!("{n}/{d}");
    }
    format!(
        "{}({}-bit)/({}-bit)",
        if n.is_negative() { "-" } else { "" },
        n.bits(),
        d.bits()
    )
}

/// Serde adapter writing a `BigUint` as a decimal string.
pub mod biguint_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("2/3"), Some(BigRational::new(2.into(), 3.into())));
        assert_eq!(parse_rational("0.25"), Some(BigRational::new(1.into(), 4.into())));
        assert_eq!(parse_rational("-1.5"), Some(BigRational::new((-3).into(), 2.into())));
        assert_eq!(parse_rational("7"), Some(from_u64(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn q_serializes_as_fraction() {
        let q = Q(BigRational::new(6.into(), 4.into()));
        let text = serde_json::to_string(&q).unwrap();
        assert_eq!(text, "\"3/2\"");
        assert_eq!(serde_json::from_str::<Q>(&text).unwrap(), q);
    }
}
