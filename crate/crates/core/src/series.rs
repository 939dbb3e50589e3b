//! Exact terms and partial sums of `Σ ±a_n / b_n`, the geometric tail bound,
//! and certified decimal enclosures of the limit.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{half, ratio, ten_pow_neg, Q};
use crate::seqexpr::{EvalConfig, EvalError, ParseError, SequenceExpr};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignMode {
    AllPositive,
    /// Sign `(-1)^(n - start)`, flipped when `first_positive` is false.
    Alternating {
        first_positive: bool,
    },
    /// Periodic sign pattern starting at the first index; `true` is negative.
    General {
        negative: Vec<bool>,
    },
}

/// How much a finite-prefix check actually establishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strength {
    #[serde(rename = "Evidence-only")]
    EvidenceOnly,
    #[serde(rename = "Proven-on-prefix")]
    ProvenOnPrefix,
    #[serde(rename = "Envelope-certified")]
    EnvelopeCertified,
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::EvidenceOnly => "Evidence-only",
            Strength::ProvenOnPrefix => "Proven-on-prefix",
            Strength::EnvelopeCertified => "Envelope-certified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSpec {
    pub numer: SequenceExpr,
    pub denom: SequenceExpr,
    pub sign_mode: SignMode,
    pub start_index: u64,
}

impl SeriesSpec {
    pub fn new(numer: SequenceExpr, denom: SequenceExpr) -> SeriesSpec {
        SeriesSpec {
            numer,
            denom,
            sign_mode: SignMode::AllPositive,
            start_index: 1,
        }
    }

    /// All-positive spec from expression text, starting at `n = 1`.
    pub fn parse(numer: &str, denom: &str) -> Result<SeriesSpec, ParseError> {
        Ok(SeriesSpec::new(numer.parse()?, denom.parse()?))
    }

    pub fn with_sign(mut self, sign_mode: SignMode) -> SeriesSpec {
        self.sign_mode = sign_mode;
        self
    }

    pub fn starting_at(mut self, start: u64) -> SeriesSpec {
        self.start_index = start;
        self
    }

    pub fn is_all_positive(&self) -> bool {
        self.sign_mode == SignMode::AllPositive
    }

    pub fn is_negative_at(&self, n: u64) -> bool {
        let k = n - self.start_index;
        match &self.sign_mode {
            SignMode::AllPositive => false,
            SignMode::Alternating { first_positive } => (k % 2 == 1) == *first_positive,
            SignMode::General { negative } if negative.is_empty() => false,
            SignMode::General { negative } => negative[(k % negative.len() as u64) as usize],
        }
    }

    pub fn validate(&self) -> Result<(), SeriesError> {
        if self.numer.uses_arg() || self.denom.uses_arg() {
            return Err(SeriesError::InvalidSpec(
                "the growth argument `b` may not appear in a series term".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("index {n} is below the first index {start}")]
    BelowStart { n: u64, start: u64 },
    #[error("ratio certificate does not cover the tail starting at index {tail_start}")]
    CertificateGap { tail_start: u64 },
    #[error("|c(n+1)/c(n)| <= 1/2 fails at n = {n}")]
    RatioCheckFailed { n: u64 },
    #[error("no run of ratios <= 1/2 found within {scanned} terms")]
    NoConvergenceEvidence { scanned: u64 },
    #[error("enclosure endpoints disagree at digit {digits}")]
    InsufficientWidth { digits: u32 },
    #[error("invalid series: {0}")]
    InvalidSpec(String),
}

/// `c_n = ±a_n / b_n`, keeping `a_n` and `b_n` as given (unreduced).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub n: u64,
    pub a: BigUint,
    pub b: BigUint,
    pub negative: bool,
}

impl Term {
    pub fn magnitude(&self) -> BigRational {
        ratio(&self.a, &self.b)
    }

    pub fn value(&self) -> BigRational {
        let m = self.magnitude();
        if self.negative {
            -m
        } else {
            m
        }
    }
}

pub fn term(spec: &SeriesSpec, n: u64, cfg: &EvalConfig) -> Result<Term, SeriesError> {
    if n < spec.start_index {
        return Err(SeriesError::BelowStart {
            n,
            start: spec.start_index,
        });
    }
    Ok(Term {
        n,
        a: spec.numer.eval(n, cfg)?,
        b: spec.denom.eval(n, cfg)?,
        negative: spec.is_negative_at(n),
    })
}

/// Exact `Σ_{n=start}^{last} c_n`, summed in ascending order.
pub fn partial_sum(spec: &SeriesSpec, last: u64, cfg: &EvalConfig) -> Result<BigRational, SeriesError> {
    if last < spec.start_index {
        return Err(SeriesError::BelowStart {
            n: last,
            start: spec.start_index,
        });
    }
    let mut sum = BigRational::zero();
    for n in spec.start_index..=last {
        sum += term(spec, n, cfg)?.value();
    }
    Ok(sum)
}

/// `|c_{n+1} / c_n| = a_{n+1} b_n / (a_n b_{n+1})`.
pub fn ratio_between(cur: &Term, next: &Term) -> BigRational {
    BigRational::new(BigInt::from(&next.a * &cur.b), BigInt::from(&cur.a * &next.b))
}

/// A user-supplied decreasing bound `g(n) = numer(n) / denom(n)` on `|c_{n+1}/c_n|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub numer: SequenceExpr,
    pub denom: SequenceExpr,
}

impl Envelope {
    pub fn at(&self, n: u64, cfg: &EvalConfig) -> Result<BigRational, EvalError> {
        Ok(ratio(&self.numer.eval(n, cfg)?, &self.denom.eval(n, cfg)?))
    }
}

/// Evidence that `|c_{n+1}/c_n| <= 1/2` for `from_index <= n <= checked_to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioCertificate {
    pub from_index: u64,
    pub checked_to: u64,
    /// Textual envelope `numer/denom`, when one was validated.
    pub envelope: Option<String>,
    pub strength: Strength,
}

/// Checks the ratio bound exactly for every `n` in `from..=to`. With an
/// envelope, also checks `g(n) >= |c_{n+1}/c_n|`, `g` decreasing and
/// `g(n) <= 1/2` on the same range.
pub fn certify_ratios(
    spec: &SeriesSpec,
    from: u64,
    to: u64,
    envelope: Option<&Envelope>,
    cfg: &EvalConfig,
) -> Result<RatioCertificate, SeriesError> {
    let mut prev = term(spec, from, cfg)?;
    let mut prev_env: Option<BigRational> = None;
    for n in from..=to {
        let next = term(spec, n + 1, cfg)?;
        let r = ratio_between(&prev, &next);
        if r > half() {
            return Err(SeriesError::RatioCheckFailed { n });
        }
        if let Some(env) = envelope {
            let g = env.at(n, cfg)?;
            let decreasing = prev_env.as_ref().is_none_or(|p| g < *p);
            if g < r || g > half() || !decreasing {
                return Err(SeriesError::RatioCheckFailed { n });
            }
            prev_env = Some(g);
        }
        prev = next;
    }
    Ok(RatioCertificate {
        from_index: from,
        checked_to: to,
        envelope: envelope.map(|e| format!("({})/({})", e.numer, e.denom)),
        strength: if envelope.is_some() {
            Strength::EnvelopeCertified
        } else {
            Strength::ProvenOnPrefix
        },
    })
}

/// `2 |c_{N+1}|`, bounding `|Σ_{n>N} c_n|` under the certificate.
pub fn tail_bound(
    spec: &SeriesSpec,
    last: u64,
    cert: &RatioCertificate,
    cfg: &EvalConfig,
) -> Result<BigRational, SeriesError> {
    let tail_start = last + 1;
    if cert.from_index > tail_start || cert.checked_to < tail_start {
        return Err(SeriesError::CertificateGap { tail_start });
    }
    Ok(term(spec, tail_start, cfg)?.magnitude() * BigRational::from_integer(2.into()))
}

/// Exact rational interval certified to contain the limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: Q,
    pub hi: Q,
    pub certified_from: u64,
    pub tail_bound: Q,
    pub strength: Strength,
}

impl Enclosure {
    pub fn exact(v: BigRational) -> Enclosure {
        Enclosure {
            lo: Q(v.clone()),
            hi: Q(v),
            certified_from: 0,
            tail_bound: Q(BigRational::zero()),
            strength: Strength::ProvenOnPrefix,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi.0 - &self.lo.0
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        self.lo.0 <= *v && *v <= self.hi.0
    }
}

/// Ratios are verified this many indices past the tail start before an
/// enclosure is issued.
pub const RATIO_LOOKAHEAD: u64 = 4;
/// Maximum number of terms scanned by [`enclose`].
pub const SCAN_LIMIT: u64 = 10_000;

/// Smallest-prefix enclosure of width at most `10^-target_digits`.
pub fn enclose(spec: &SeriesSpec, target_digits: u32, cfg: &EvalConfig) -> Result<Enclosure, SeriesError> {
    enclose_within(spec, &ten_pow_neg(target_digits), cfg)
}

pub fn enclose_within(spec: &SeriesSpec, max_width: &BigRational, cfg: &EvalConfig) -> Result<Enclosure, SeriesError> {
    let start = spec.start_index;
    let mut terms: Vec<Term> = Vec::new();
    // index where the current run of ratios <= 1/2 began
    let mut run_start: Option<u64> = None;
    let mut ratio_checked_to: Option<u64> = None;
    let mut sum = BigRational::zero();
    let mut summed_to = start;
    let two = BigRational::from_integer(2.into());

    // terms past the bit budget are left out of the lookahead
    let mut exhausted = false;
    let mut fetch = |terms: &mut Vec<Term>, upto: u64| -> Result<(), SeriesError> {
        while !exhausted && start + (terms.len() as u64) <= upto {
            let n = start + terms.len() as u64;
            match term(spec, n, cfg) {
                Ok(t) => terms.push(t),
                Err(SeriesError::Eval(e)) if is_budget(&e) => exhausted = true,
                Err(e) => return Err(e),
            }
        }
        Ok(())
    };

    for last in start..start + SCAN_LIMIT {
        fetch(&mut terms, last + 2 + RATIO_LOOKAHEAD)?;
        let available = start + terms.len() as u64;
        if available < last + 3 {
            // the ratio c(N+2)/c(N+1) is needed at the very least
            return Err(EvalError::BitBudgetExceeded { budget: cfg.bit_budget }.into());
        }
        let need = (last + 1 + RATIO_LOOKAHEAD).min(available - 2);
        let from = ratio_checked_to.map_or(start, |c| c + 1);
        for n in from..=need {
            let i = (n - start) as usize;
            if ratio_between(&terms[i], &terms[i + 1]) <= half() {
                run_start.get_or_insert(n);
            } else {
                run_start = None;
            }
            ratio_checked_to = Some(n);
        }
        let tail_start = last + 1;
        if !run_start.is_some_and(|r| r <= tail_start) {
            continue;
        }
        // summing lazily keeps slowly converging inputs cheap to reject
        while summed_to <= last {
            sum += terms[(summed_to - start) as usize].value();
            summed_to += 1;
        }
        let next = &terms[(tail_start - start) as usize];
        let bound = next.magnitude() * &two;
        let (mut lo, mut hi) = if spec.is_all_positive() {
            (sum.clone(), &sum + &bound)
        } else {
            (&sum - &bound, &sum + &bound)
        };
        if matches!(spec.sign_mode, SignMode::Alternating { .. }) {
            // ratios <= 1/2 make |c_n| decreasing, so the tail has the sign
            // of c_{N+1} and modulus at most |c_{N+1}|
            let other = &sum + next.value();
            let (l, h) = if other < sum {
                (other, sum.clone())
            } else {
                (sum.clone(), other)
            };
            lo = lo.max(l);
            hi = hi.min(h);
        }
        if &hi - &lo <= *max_width {
            return Ok(Enclosure {
                lo: Q(lo),
                hi: Q(hi),
                certified_from: last,
                tail_bound: Q(bound),
                strength: Strength::ProvenOnPrefix,
            });
        }
    }
    Err(SeriesError::NoConvergenceEvidence { scanned: SCAN_LIMIT })
}

fn is_budget(e: &EvalError) -> bool {
    matches!(
        e,
        EvalError::BitBudgetExceeded { .. } | EvalError::PrimeCeilingExceeded { .. }
    )
}

fn truncated_decimal(v: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10).pow(digits);
    let scaled = (v.abs() * BigRational::from_integer(scale)).to_integer();
    let mut s = scaled.to_string();
    if s.len() <= digits as usize {
        s = format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s);
    }
    let split = s.len() - digits as usize;
    let sign = if v.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{s}")
    } else {
        format!("{sign}{}.{}", &s[..split], &s[split..])
    }
}

/// Decimal string with `digits` places after the point, all certified by
/// both endpoints. A trailing `…` marks a non-terminating or uncertain tail.
pub fn render_decimal(enc: &Enclosure, digits: u32) -> Result<String, SeriesError> {
    let lo = truncated_decimal(&enc.lo.0, digits);
    let hi = truncated_decimal(&enc.hi.0, digits);
    if lo != hi {
        return Err(SeriesError::InsufficientWidth { digits });
    }
    let scaled = &enc.lo.0 * BigRational::from_integer(BigInt::from(10).pow(digits));
    if enc.lo == enc.hi && scaled.is_integer() {
        Ok(lo)
    } else {
        Ok(format!("{lo}…"))
    }
}

/// Renders `digits` places, tightening the enclosure until the endpoints agree.
pub fn certified_decimal(spec: &SeriesSpec, digits: u32, cfg: &EvalConfig) -> Result<(Enclosure, String), SeriesError> {
    let mut extra = 2;
    loop {
        let enc = enclose(spec, digits + extra, cfg)?;
        match render_decimal(&enc, digits) {
            Ok(s) => return Ok((enc, s)),
            Err(SeriesError::InsufficientWidth { .. }) if extra < 64 => extra *= 2,
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_u64, parse_rational};
    use num_traits::One;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn e_spec() -> SeriesSpec {
        SeriesSpec::parse("1", "n!").unwrap().starting_at(0)
    }

    fn sin_spec(r: u64) -> SeriesSpec {
        SeriesSpec::parse("1", &format!("(2*n - 1)!*{r}^(2*n - 1)"))
            .unwrap()
            .with_sign(SignMode::Alternating { first_positive: true })
    }

    fn liouville() -> SeriesSpec {
        SeriesSpec::parse("1", "10^(n!)").unwrap()
    }

    #[test]
    fn term_examples() {
        let ex2 = SeriesSpec::parse("n^4", "(n!)^5").unwrap();
        let t = term(&ex2, 2, &cfg()).unwrap();
        assert_eq!((t.a.clone(), t.b.clone()), (BigUint::from(16u32), BigUint::from(32u32)));
        assert_eq!(t.value(), q("1/2"));
        assert_eq!(term(&e_spec(), 0, &cfg()).unwrap().value(), BigRational::one());
        assert_eq!(term(&sin_spec(3), 2, &cfg()).unwrap().value(), q("-1/162"));
        assert!(matches!(term(&ex2, 0, &cfg()), Err(SeriesError::BelowStart { .. })));
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(partial_sum(&e_spec(), 3, &cfg()).unwrap(), q("8/3"));
        assert_eq!(partial_sum(&e_spec(), 0, &cfg()).unwrap(), BigRational::one());
        assert_eq!(partial_sum(&liouville(), 3, &cfg()).unwrap(), q("110001/1000000"));
    }

    #[test]
    fn telescoping() {
        for spec in [e_spec(), sin_spec(2), liouville()] {
            for n in spec.start_index + 1..=6 {
                let diff = partial_sum(&spec, n, &cfg()).unwrap() - partial_sum(&spec, n - 1, &cfg()).unwrap();
                assert_eq!(diff, term(&spec, n, &cfg()).unwrap().value());
            }
        }
    }

    #[test]
    fn tail_bound_examples() {
        let cert = certify_ratios(&e_spec(), 1, 20, None, &cfg()).unwrap();
        let tb = tail_bound(&e_spec(), 9, &cert, &cfg()).unwrap();
        let ten_fact: u64 = (1..=10).product();
        assert_eq!(tb, BigRational::new(2.into(), ten_fact.into()));

        let cert = certify_ratios(&liouville(), 1, 5, None, &cfg()).unwrap();
        assert_eq!(tail_bound(&liouville(), 2, &cert, &cfg()).unwrap(), q("2/1000000"));

        // geometric series: the bound 2 c_{N+1} equals the true tail 2^-N
        let geo = SeriesSpec::parse("1", "2^n").unwrap();
        let cert = certify_ratios(&geo, 1, 30, None, &cfg()).unwrap();
        let tb = tail_bound(&geo, 5, &cert, &cfg()).unwrap();
        assert_eq!(tb, q("1/32"));
        assert_eq!(BigRational::one() - partial_sum(&geo, 5, &cfg()).unwrap(), tb);
    }

    #[test]
    fn tail_bound_requires_coverage() {
        let cert = certify_ratios(&e_spec(), 5, 20, None, &cfg()).unwrap();
        assert_eq!(
            tail_bound(&e_spec(), 2, &cert, &cfg()),
            Err(SeriesError::CertificateGap { tail_start: 3 })
        );
        assert_eq!(
            certify_ratios(&e_spec(), 0, 5, None, &cfg()),
            Err(SeriesError::RatioCheckFailed { n: 0 })
        );
    }

    #[test]
    fn envelope_validation() {
        // |c_{n+1}/c_n| = 1/(n+1) for e; g(n) = 1/n dominates and decreases
        let env = Envelope {
            numer: "1".parse().unwrap(),
            denom: "n".parse().unwrap(),
        };
        let cert = certify_ratios(&e_spec(), 2, 15, Some(&env), &cfg()).unwrap();
        assert_eq!(cert.strength, Strength::EnvelopeCertified);
        let too_small = Envelope {
            numer: "1".parse().unwrap(),
            denom: "n + 2".parse().unwrap(),
        };
        assert!(certify_ratios(&e_spec(), 2, 15, Some(&too_small), &cfg()).is_err());
    }

    #[test]
    fn enclosure_of_e() {
        let enc = enclose(&e_spec(), 50, &cfg()).unwrap();
        assert!(enc.width() <= ten_pow_neg(50));
        let digits = render_decimal(&enc, 10).unwrap();
        assert_eq!(digits, "2.7182818284…");
        let (_, fifty) = certified_decimal(&e_spec(), 50, &cfg()).unwrap();
        assert_eq!(fifty, "2.71828182845904523536028747135266249775724709369995…");
    }

    #[test]
    fn enclosure_of_sin_one() {
        let (enc, s) = certified_decimal(&sin_spec(1), 30, &cfg()).unwrap();
        assert_eq!(s, "0.841470984807896506652502321630…");
        assert!(enc.width() <= ten_pow_neg(30));
    }

    #[test]
    fn enclosure_of_geometric_contains_one() {
        let geo = SeriesSpec::parse("1", "2^n").unwrap();
        let enc = enclose(&geo, 10, &cfg()).unwrap();
        assert!(enc.contains(&BigRational::one()));
        assert!(enc.width() <= ten_pow_neg(10));
    }

    #[test]
    fn enclosures_shrink_monotonically() {
        let mut prev: Option<Enclosure> = None;
        for d in 1..25 {
            let enc = enclose(&sin_spec(2), d, &cfg()).unwrap();
            if let Some(p) = &prev {
                assert!(enc.width() <= p.width());
            }
            prev = Some(enc);
        }
    }

    #[test]
    fn render_examples() {
        let half = Enclosure::exact(q("1/2"));
        assert_eq!(render_decimal(&half, 5).unwrap(), "0.50000");
        let wide = Enclosure {
            lo: Q(q("0.1234")),
            hi: Q(q("0.1236")),
            certified_from: 0,
            tail_bound: Q(q("0.0001")),
            strength: Strength::ProvenOnPrefix,
        };
        assert_eq!(
            render_decimal(&wide, 4),
            Err(SeriesError::InsufficientWidth { digits: 4 })
        );
        assert_eq!(render_decimal(&Enclosure::exact(from_u64(3)), 0).unwrap(), "3");
        assert_eq!(render_decimal(&Enclosure::exact(q("-1/4")), 3).unwrap(), "-0.250");
    }

    #[test]
    fn no_convergence_for_slow_series() {
        let slow = SeriesSpec::parse("1", "n^2").unwrap();
        assert!(matches!(
            enclose(&slow, 5, &cfg()),
            Err(SeriesError::NoConvergenceEvidence { .. })
        ));
    }
}
