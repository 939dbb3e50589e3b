//! Irrationality classifiers: the basic criterion, sums of two series, the
//! lcm criterion and geometric series with polynomial exponents.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow};

use super::conditions::{check_divisibility_chain, check_tail_nonvanishing, check_weighted_ratio_limit};
use super::{decreasing_below, eval_within, Certificate, CheckOptions, Condition, CriteriaError, Theorem, Verdict};
use crate::magnitude::{compare, magnitude_of, Certainty, Magnitude};
use crate::rational::Q;
use crate::seqexpr::{Node, SequenceExpr};
use crate::series::{SeriesSpec, Strength};

/// Checks conditions (1)-(3); positive series go through the shortcut where
/// condition (3) is automatic.
pub fn classify_irrational(spec: &SeriesSpec, opts: &CheckOptions) -> Result<Certificate, CriteriaError> {
    spec.validate()?;
    let theorem = if spec.is_all_positive() {
        Theorem::T2
    } else {
        Theorem::T1
    };
    let mut notes = Vec::new();
    let tail = match check_tail_nonvanishing(spec, opts) {
        Ok(c) => c,
        Err(CriteriaError::UnsupportedSignMode) => {
            let mut c = Condition::new("tail_nonvanishing", spec.start_index);
            c.strength = Strength::EvidenceOnly;
            c.fail("general sign patterns are evaluated but not classified")
        }
        Err(e) => return Err(e),
    };
    if theorem == Theorem::T1 {
        notes.push("tails checked for every N up to the prefix; the argument needs them only for all large N".into());
    }
    let conditions = vec![
        check_divisibility_chain(spec, opts)?,
        check_weighted_ratio_limit(spec, opts)?,
        tail,
    ];
    Ok(Certificate::assemble(theorem, Verdict::Irrational, conditions, notes))
}

/// `ã_n = a_n b'_n + b_n a'_n`, `b̃_n = b_n b'_n`: the termwise sum.
pub fn combined_spec(a: &SeriesSpec, b: &SeriesSpec) -> SeriesSpec {
    let (an, ad) = (a.numer.root().clone(), a.denom.root().clone());
    let (bn, bd) = (b.numer.root().clone(), b.denom.root().clone());
    SeriesSpec::new(
        SequenceExpr::new(Node::add(Node::mul(an, bd.clone()), Node::mul(ad.clone(), bn))),
        SequenceExpr::new(Node::mul(ad, bd)),
    )
    .starting_at(a.start_index)
}

fn cross_ratio(
    name: &str,
    own: &SeriesSpec,
    other: &SeriesSpec,
    opts: &CheckOptions,
) -> Result<Condition, CriteriaError> {
    let cfg = &opts.eval;
    let start = own.start_index;
    let mut cond = Condition::new(name, start);
    let mut truncated = false;
    for n in start..=opts.prefix.max(start) {
        let vals = (
            eval_within(&own.numer, n + 1, cfg)?,
            eval_within(&own.denom, n, cfg)?,
            eval_within(&other.denom, n, cfg)?,
            eval_within(&own.denom, n + 1, cfg)?,
        );
        let (Some(a1), Some(b), Some(b2), Some(b1)) = vals else {
            truncated = true;
            break;
        };
        cond.push(n, BigRational::new(BigInt::from(a1 * b * b2), BigInt::from(b1)));
        cond.to = n;
    }
    if let Err(why) = decreasing_below(&cond.values, opts) {
        return Ok(cond.fail(why));
    }
    cond.holds = true;
    if truncated {
        cond.detail = format!("exact values stop at n = {} (bit budget)", cond.to);
    }
    Ok(cond)
}

fn summary_condition(name: &str, cert: &Certificate, start: u64) -> Condition {
    let mut c = Condition::new(name, start);
    c.holds = cert.verdict == Verdict::Irrational && cert.theorem == Theorem::T2;
    c.to = cert.conditions.iter().map(|x| x.to).min().unwrap_or(start);
    c.strength = cert.strength;
    if !c.holds {
        c.detail = "summand is not certified irrational by the positive-term criterion".into();
    }
    c
}

/// Irrationality of `α + β` for two positive series. Returns the
/// certificate and the termwise-sum series.
pub fn check_sum_pair(
    a: &SeriesSpec,
    b: &SeriesSpec,
    opts: &CheckOptions,
) -> Result<(Certificate, SeriesSpec), CriteriaError> {
    if !a.is_all_positive() || !b.is_all_positive() {
        return Err(CriteriaError::UnsupportedSignMode);
    }
    if a.start_index != b.start_index {
        return Err(CriteriaError::InvalidParam(
            "both series must start at the same index".into(),
        ));
    }
    let ca = classify_irrational(a, opts)?;
    let cb = classify_irrational(b, opts)?;
    let conditions = vec![
        summary_condition("alpha_irrational", &ca, a.start_index),
        summary_condition("beta_irrational", &cb, b.start_index),
        cross_ratio("cross_ratio_alpha", a, b, opts)?,
        cross_ratio("cross_ratio_beta", b, a, opts)?,
    ];
    let combined = combined_spec(a, b);
    let notes = vec![format!("termwise sum: ({}) / ({})", combined.numer, combined.denom)];
    Ok((
        Certificate::assemble(Theorem::T3, Verdict::Irrational, conditions, notes),
        combined,
    ))
}

// ln 2 is in [LN2_LO, LN2_HI] / 10^19
const LN2_HI: u64 = 6_931_471_805_599_453_095;
const LN2_DEN: u64 = 10_000_000_000_000_000_000;

/// `r_n = a_{n+1} lcm(b_1..b_n) / b_{n+1} -> 0` without a divisibility chain.
pub fn check_lcm_criterion(spec: &SeriesSpec, opts: &CheckOptions) -> Result<Certificate, CriteriaError> {
    spec.validate()?;
    if !spec.is_all_positive() {
        return Err(CriteriaError::UnsupportedSignMode);
    }
    let cfg = &opts.eval;
    let start = spec.start_index;
    let last = opts.prefix.max(start);
    let mut cond = Condition::new("lcm_ratio_limit", start);
    let mut lcm = eval_within(&spec.denom, start, cfg)?;
    let mut stopped_at = None;
    for n in start..=last {
        let Some(l) = &lcm else {
            stopped_at = Some(n);
            break;
        };
        let (Some(a1), Some(b1)) = (
            eval_within(&spec.numer, n + 1, cfg)?,
            eval_within(&spec.denom, n + 1, cfg)?,
        ) else {
            stopped_at = Some(n);
            break;
        };
        cond.push(n, BigRational::new(BigInt::from(&a1 * l), BigInt::from(b1.clone())));
        cond.to = n;
        let next = l.lcm(&b1);
        lcm = (next.bits() <= cfg.bit_budget).then_some(next);
    }
    let mut notes = Vec::new();
    let cond = match (decreasing_below(&cond.values, opts), stopped_at) {
        (Ok(()), _) => Condition { holds: true, ..cond },
        (Err(_), Some(from)) if prime_index(spec).is_some() => {
            notes.push(format!(
                "exact lcm values stop at n = {from}; continuing with prime-counting bounds c1 = {}, c2 = {} \
                 (heuristic constants)",
                opts.hua.c1, opts.hua.c2
            ));
            let exact = cond;
            let hua = hua_condition(spec, from, last, opts)?;
            let mut c = Condition {
                from: exact.from,
                values: exact.values,
                ..hua
            };
            if c.holds {
                c.detail = format!("exact up to n = {}, bound mode after", exact.to);
            }
            c
        }
        (Err(why), _) => cond.fail(why),
    };
    Ok(Certificate::assemble(
        Theorem::T4,
        Verdict::Irrational,
        vec![cond],
        notes,
    ))
}

fn prime_index(spec: &SeriesSpec) -> Option<SequenceExpr> {
    match spec.denom.root() {
        Node::NthPrime(k) => Some(SequenceExpr::new((**k).clone())),
        _ => None,
    }
}

/// For `b_n = p_{i_n}` with distinct primes, `lcm(b_1..b_n) <= Π p_{i_k}`, and
/// `c1 i ln i < p_i < c2 i ln i` turns `r_n < threshold` into
/// `K a_{n+1} Π (i_k log2 i_k) < i_{n+1} log2 i_{n+1}` with
/// `K = c2^m ln2^(m-1) / (c1 threshold)`, `m = n - start + 1`.
fn hua_condition(spec: &SeriesSpec, from: u64, last: u64, opts: &CheckOptions) -> Result<Condition, CriteriaError> {
    let cfg = &opts.eval;
    let idx = prime_index(spec).expect("checked by caller");
    let start = spec.start_index;
    let mut cond = Condition::new("lcm_ratio_limit", from);
    cond.strength = Strength::EvidenceOnly;
    let i_log_i = |k: u64| -> Result<Magnitude, CriteriaError> {
        let i = magnitude_of(&idx, k, cfg).map_err(|e| CriteriaError::InvalidParam(e.to_string()))?;
        let l = i.log2().map_err(|e| CriteriaError::InvalidParam(e.to_string()))?;
        i.mul(&l, cfg).map_err(|e| CriteriaError::InvalidParam(e.to_string()))
    };
    let mut product = Magnitude::from_u64(1);
    for k in start..from {
        product = product
            .mul(&i_log_i(k)?, cfg)
            .map_err(|e| CriteriaError::InvalidParam(e.to_string()))?;
    }
    let mut proven = Vec::new();
    for n in from..=last {
        let step = (|| -> Result<Certainty, CriteriaError> {
            product = product
                .mul(&i_log_i(n)?, cfg)
                .map_err(|e| CriteriaError::InvalidParam(e.to_string()))?;
            let m = n - start + 1;
            let ln2 = BigRational::new(LN2_HI.into(), LN2_DEN.into());
            let k = opts.hua.c2.0.clone().pow(m as i32) * ln2.pow((m - 1) as i32) / (&opts.hua.c1.0 * &opts.threshold);
            let k = k.max(BigRational::one());
            let k = k.ceil().to_integer();
            let k = Magnitude::exact(k.to_biguint().unwrap());
            let a1 = magnitude_of(&spec.numer, n + 1, cfg).map_err(|e| CriteriaError::InvalidParam(e.to_string()))?;
            let lhs = k
                .mul(&a1, cfg)
                .and_then(|x| x.mul(&product, cfg))
                .map_err(|e| CriteriaError::InvalidParam(e.to_string()))?;
            Ok(compare(&lhs, &i_log_i(n + 1)?))
        })();
        match step {
            Ok(c) => {
                proven.push(c == Certainty::ProvenBelow);
                cond.to = n;
            }
            Err(_) => break,
        }
    }
    let window = opts.window.max(1);
    if proven.len() < window {
        return Ok(cond.fail(format!("bound mode decided only {} indices", proven.len())));
    }
    if !proven[proven.len() - window..].iter().all(|p| *p) {
        return Ok(cond.fail("prime-counting bound does not fall below the threshold"));
    }
    cond.holds = true;
    Ok(cond)
}

/// `c_n = a^{-P(n)}` for a polynomial `P` with integer coefficients listed
/// from the leading one down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyExp {
    pub base: u64,
    pub coefficients: Vec<u64>,
}

impl PolyExp {
    pub fn new(base: u64, coefficients: Vec<u64>) -> Result<PolyExp, CriteriaError> {
        let p = PolyExp { base, coefficients };
        p.validate()?;
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    fn validate(&self) -> Result<(), CriteriaError> {
        if self.base < 2 {
            return Err(CriteriaError::InvalidPolynomial("base must be at least 2".into()));
        }
        if self.coefficients.len() < 2 {
            return Err(CriteriaError::InvalidPolynomial("degree must be at least 1".into()));
        }
        if self.coefficients[0] < 1 {
            return Err(CriteriaError::InvalidPolynomial(
                "leading coefficient must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn eval(&self, n: u64) -> BigUint {
        self.coefficients
            .iter()
            .fold(BigUint::from(0u32), |acc, c| acc * n + *c)
    }

    /// `P(n)` as expression text.
    pub fn poly_text(&self) -> String {
        let m = self.degree();
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| match (m - i, *c) {
                (0, c) => c.to_string(),
                (1, 1) => "n".into(),
                (1, c) => format!("{c}*n"),
                (k, 1) => format!("n^{k}"),
                (k, c) => format!("{c}*n^{k}"),
            })
            .collect();
        parts.join(" + ")
    }

    pub fn to_spec(&self) -> SeriesSpec {
        SeriesSpec::parse("1", &format!("{}^({})", self.base, self.poly_text())).expect("generated expression parses")
    }
}

/// Geometric series with polynomial exponent: rational with a closed form
/// for degree 1, irrational from degree 2.
pub fn classify_geometric_poly(p: &PolyExp, opts: &CheckOptions) -> Result<Certificate, CriteriaError> {
    p.validate()?;
    let last = opts.prefix.max(2);
    let mut growth = Condition::new("exponent_difference", 1);
    let mut prev: Option<BigUint> = None;
    let mut increasing = true;
    let mut constant = true;
    for n in 1..=last {
        let d = p.eval(n + 1) - p.eval(n);
        if let Some(pd) = &prev {
            increasing &= d > *pd;
            constant &= d == *pd;
        }
        growth.push(n, BigRational::from_integer(BigInt::from(d.clone())));
        growth.to = n;
        prev = Some(d);
    }
    if p.degree() == 1 {
        let (b0, b1) = (p.coefficients[0], p.coefficients[1]);
        let a = BigUint::from(p.base);
        let den = a.clone().pow(b1) * (a.pow(b0) - 1u32);
        let value = BigRational::new(BigInt::one(), BigInt::from(den));
        growth.holds = constant;
        growth.detail = "P(n+1) - P(n) is constant: the series is geometric".into();
        let notes = vec![format!("sum = 1/({}^{b1} ({}^{b0} - 1))", p.base, p.base)];
        return Ok(Certificate::assemble(
            Theorem::T5,
            Verdict::Rational(Q(value)),
            vec![growth],
            notes,
        ));
    }
    growth.holds = increasing;
    growth.detail = "P(n+1) - P(n) strictly increases, so c(n+1)/c(n) = a^-(P(n+1) - P(n)) -> 0".into();
    let mut conditions = vec![growth];
    conditions.extend(classify_irrational(&p.to_spec(), opts)?.conditions);
    Ok(Certificate::assemble(
        Theorem::T5,
        Verdict::Irrational,
        conditions,
        Vec::new(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use crate::seqexpr::EvalConfig;
    use crate::series::SignMode;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn opts() -> CheckOptions {
        CheckOptions::default()
    }

    fn sin_spec(r: u64) -> SeriesSpec {
        SeriesSpec::parse("1", &format!("(2*n - 1)!*{r}^(2*n - 1)"))
            .unwrap()
            .with_sign(SignMode::Alternating { first_positive: true })
    }

    #[test]
    fn classify_examples() {
        let e = SeriesSpec::parse("1", "n!").unwrap().starting_at(0);
        let c = classify_irrational(&e, &opts()).unwrap();
        assert_eq!((c.theorem, c.verdict.clone()), (Theorem::T2, Verdict::Irrational));
        assert_eq!(c.strength, Strength::ProvenOnPrefix);

        for r in [1, 2, 3, 5] {
            let c = classify_irrational(&sin_spec(r), &opts()).unwrap();
            assert_eq!((c.theorem, c.verdict), (Theorem::T1, Verdict::Irrational), "r = {r}");
        }

        let geo = SeriesSpec::parse("1", "2^n").unwrap();
        assert_eq!(
            classify_irrational(&geo, &opts()).unwrap().verdict,
            Verdict::Inconclusive
        );

        let general = e.with_sign(SignMode::General {
            negative: vec![false, false, true],
        });
        let c = classify_irrational(&general, &opts()).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert_eq!(c.strength, Strength::EvidenceOnly);
    }

    #[test]
    fn sum_pair_examples() {
        let a = SeriesSpec::parse("1", "2^(n!)").unwrap();
        let b = SeriesSpec::parse("1", "3^(n!)").unwrap();
        let (cert, combined) = check_sum_pair(&a, &b, &opts()).unwrap();
        assert_eq!((cert.theorem, cert.verdict.clone()), (Theorem::T3, Verdict::Irrational));
        let x = cert.condition("cross_ratio_alpha").unwrap();
        assert_eq!(x.value_at(3), Some(&q("729/262144")));
        let y = cert.condition("cross_ratio_beta").unwrap();
        assert_eq!(y.value_at(2), Some(&q("4/81")));
        let cfg = EvalConfig::default();
        assert_eq!(combined.denom.eval(2, &cfg).unwrap(), BigUint::from(36u32));
        assert_eq!(combined.numer.eval(2, &cfg).unwrap(), BigUint::from(13u32));

        let e = SeriesSpec::parse("1", "n!").unwrap().starting_at(0);
        let (cert, combined) = check_sum_pair(&e, &e, &opts()).unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
        let x = cert.condition("cross_ratio_alpha").unwrap();
        // (n!)^2 / (n+1)! = n!/(n+1)
        assert_eq!(x.value_at(3), Some(&q("6/4")));
        assert_eq!(combined.denom.eval(3, &cfg).unwrap(), BigUint::from(36u32));
    }

    #[test]
    fn lcm_examples() {
        let sq = SeriesSpec::parse("1", "2^(n*n)").unwrap();
        let c = check_lcm_criterion(&sq, &opts()).unwrap();
        assert_eq!(c.verdict, Verdict::Irrational);
        assert_eq!(c.conditions[0].value_at(3), Some(&q("1/128")));

        let pt = SeriesSpec::parse("1", "nthprime(2^(2^(n!)))").unwrap();
        let c = check_lcm_criterion(&pt, &opts()).unwrap();
        assert_eq!(c.conditions[0].value_at(1), Some(&q("7/53")));
        assert_eq!(
            (c.theorem, c.verdict.clone()),
            (Theorem::T4, Verdict::Irrational),
            "{c:#?}"
        );
        assert_eq!(c.strength, Strength::EvidenceOnly);
    }

    #[test]
    fn lcm_reduces_to_weighted_ratio_on_chains() {
        for (a, b) in [("1", "n!"), ("n^4", "(n!)^5"), ("1", "2^(n!)"), ("3^n", "2^(3^n)")] {
            let spec = SeriesSpec::parse(a, b).unwrap();
            let o = CheckOptions::with_prefix(8);
            let lcm = check_lcm_criterion(&spec, &o).unwrap();
            let q = check_weighted_ratio_limit(&spec, &o).unwrap();
            assert_eq!(lcm.conditions[0].values, q.values, "{a}/{b}");
        }
    }

    #[test]
    fn geometric_poly_examples() {
        let c = classify_geometric_poly(&PolyExp::new(2, vec![1, 1]).unwrap(), &opts()).unwrap();
        assert_eq!(c.verdict, Verdict::Rational(Q(q("1/2"))));
        let c = classify_geometric_poly(&PolyExp::new(3, vec![2, 1]).unwrap(), &opts()).unwrap();
        assert_eq!(c.verdict, Verdict::Rational(Q(q("1/24"))));
        let c = classify_geometric_poly(&PolyExp::new(2, vec![1, 0, 0]).unwrap(), &opts()).unwrap();
        assert_eq!((c.theorem, c.verdict), (Theorem::T5, Verdict::Irrational));
        assert!(PolyExp::new(2, vec![0, 1]).is_err());
        assert!(PolyExp::new(1, vec![1, 1]).is_err());
        assert!(PolyExp::new(2, vec![3]).is_err());
        assert_eq!(PolyExp::new(2, vec![1, 0, 4]).unwrap().poly_text(), "n^2 + 4");
    }

    #[test]
    fn more_prefix_never_flips_a_definite_verdict() {
        let e = SeriesSpec::parse("1", "n!").unwrap().starting_at(0);
        for prefix in 12..20 {
            let c = classify_irrational(&e, &CheckOptions::with_prefix(prefix)).unwrap();
            assert_eq!(c.verdict, Verdict::Irrational);
        }
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = classify_geometric_poly(&PolyExp::new(2, vec![1, 1]).unwrap(), &opts()).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"theorem\":\"T5\""));
        assert!(text.contains("\"value\":\"1/2\""));
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
