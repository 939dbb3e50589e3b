//! The three hypotheses shared by the irrationality criteria.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;

use super::{decreasing_below, eval_within, CheckOptions, Condition, CriteriaError, IndexedValue};
use crate::magnitude::{compare, magnitude_of, Certainty};
use crate::rational::{describe, ratio, Q};
use crate::seqexpr::{EvalConfig, EvalError, Node, SequenceExpr};
use crate::series::{SeriesSpec, SignMode, Strength};

/// `q_n = a_{n+1} b_n / b_{n+1}`, equal to `a_n |c_{n+1} / c_n|`.
pub fn weighted_ratio(spec: &SeriesSpec, n: u64, cfg: &EvalConfig) -> Result<BigRational, EvalError> {
    let a_next = spec.numer.eval(n + 1, cfg)?;
    let b = spec.denom.eval(n, cfg)?;
    let b_next = spec.denom.eval(n + 1, cfg)?;
    Ok(BigRational::new(BigInt::from(a_next * b), BigInt::from(b_next)))
}

/// Splits `expr` as `base^exponent` when its top node is a power or a tower
/// of height at least two.
pub(crate) fn power_form(expr: &SequenceExpr) -> Option<(SequenceExpr, SequenceExpr)> {
    match expr.root() {
        Node::Pow(b, e) => Some((SequenceExpr::new((**b).clone()), SequenceExpr::new((**e).clone()))),
        Node::Tower { base, height, top } => Some((
            SequenceExpr::new((**base).clone()),
            SequenceExpr::new(Node::tower(
                (**base).clone(),
                Node::sub((**height).clone(), Node::int(1)),
                (**top).clone(),
            )),
        )),
        _ => None,
    }
}

/// Decides `b_n | b_{n+1}` for `b = base^e` with a fixed integer base `>= 2`
/// by comparing exponents. `None` when undecidable.
fn divides_by_exponents(expr: &SequenceExpr, n: u64, cfg: &EvalConfig) -> Option<bool> {
    let (base, exp) = power_form(expr)?;
    let b0 = base.eval(n, cfg).ok()?;
    let b1 = base.eval(n + 1, cfg).ok()?;
    if b0 != b1 || b0 < BigUint::from(2u32) {
        return None;
    }
    let e0 = magnitude_of(&exp, n, cfg).ok()?;
    let e1 = magnitude_of(&exp, n + 1, cfg).ok()?;
    match compare(&e1, &e0) {
        Certainty::ProvenBelow => Some(false),
        Certainty::ProvenAtOrAbove => Some(true),
        Certainty::Unknown => None,
    }
}

/// Condition (1): `b_n | b_{n+1}` for `start <= n < prefix`, tested on the
/// denominators as written.
pub fn check_divisibility_chain(spec: &SeriesSpec, opts: &CheckOptions) -> Result<Condition, CriteriaError> {
    let cfg = &opts.eval;
    let start = spec.start_index;
    let mut cond = Condition::new("divisibility_chain", start);
    let mut structural = false;
    let mut prev = eval_within(&spec.denom, start, cfg)?;
    for n in start..opts.prefix.max(start + 1) {
        let next = eval_within(&spec.denom, n + 1, cfg)?;
        let divides = match (&prev, &next) {
            (Some(b), Some(b1)) => Some(b1.is_multiple_of(b)),
            _ => {
                structural = true;
                divides_by_exponents(&spec.denom, n, cfg)
            }
        };
        match divides {
            Some(true) => cond.to = n + 1,
            Some(false) => return Ok(cond.fail(format!("b({}) does not divide b({})", n, n + 1))),
            None => {
                if cond.to == start {
                    cond.strength = Strength::EvidenceOnly;
                    return Ok(cond.fail("no pair could be decided within the bit budget"));
                }
                cond.detail = format!("undecided beyond n = {} within the bit budget", cond.to);
                break;
            }
        }
        prev = next;
    }
    cond.holds = true;
    if structural && cond.detail.is_empty() {
        cond.detail = "large pairs decided by comparing exponents of a common base".into();
    }
    Ok(cond)
}

/// Condition (2): `q_n -> 0`, judged by strict decrease over the final
/// window and a final value below the threshold.
pub fn check_weighted_ratio_limit(spec: &SeriesSpec, opts: &CheckOptions) -> Result<Condition, CriteriaError> {
    let cfg = &opts.eval;
    let start = spec.start_index;
    let mut cond = Condition::new("weighted_ratio_limit", start);
    let mut truncated = false;
    for n in start..=opts.prefix.max(start) {
        match weighted_ratio(spec, n, cfg) {
            Ok(q) => {
                cond.push(n, q);
                cond.to = n;
            }
            Err(e) if super::is_budget_error(&e) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Err(why) = decreasing_below(&cond.values, opts) {
        return Ok(cond.fail(why));
    }
    cond.holds = true;
    if truncated {
        cond.detail = format!("exact values stop at n = {} (bit budget)", cond.to);
    }
    if let Some(env) = &opts.envelope {
        match validate_envelope(env, &cond.values, opts) {
            Ok(()) => {
                cond.strength = Strength::EnvelopeCertified;
                cond.detail = format!("dominated by decreasing envelope ({})/({})", env.numer, env.denom);
            }
            Err(why) => cond.detail = format!("envelope rejected: {why}"),
        }
    }
    Ok(cond)
}

fn validate_envelope(
    env: &crate::series::Envelope,
    values: &[IndexedValue],
    opts: &CheckOptions,
) -> Result<(), String> {
    let mut prev: Option<BigRational> = None;
    for v in values {
        let g = env.at(v.n, &opts.eval).map_err(|e| e.to_string())?;
        if g < v.value.0 {
            return Err(format!("g({}) is below q({})", v.n, v.n));
        }
        if prev.as_ref().is_some_and(|p| g >= *p) {
            return Err(format!("g is not decreasing at n = {}", v.n));
        }
        prev = Some(g);
    }
    match prev {
        Some(g) if g < opts.threshold => Ok(()),
        Some(g) => Err(format!(
            "final envelope value {} is not below the threshold",
            describe(&g)
        )),
        None => Err("no values to dominate".into()),
    }
}

/// Condition (3): every tail `Σ_{n>=N} c_n` is nonzero.
pub fn check_tail_nonvanishing(spec: &SeriesSpec, opts: &CheckOptions) -> Result<Condition, CriteriaError> {
    let start = spec.start_index;
    let mut cond = Condition::new("tail_nonvanishing", start);
    match spec.sign_mode {
        SignMode::AllPositive => {
            cond.holds = true;
            cond.to = opts.prefix.max(start);
            cond.detail = "all terms are positive".into();
            Ok(cond)
        }
        SignMode::Alternating { .. } => {
            let cfg = &opts.eval;
            let mut prev: Option<BigRational> = None;
            for n in start..=opts.prefix.max(start + 1) {
                let (a, b) = match (eval_within(&spec.numer, n, cfg)?, eval_within(&spec.denom, n, cfg)?) {
                    (Some(a), Some(b)) => (a, b),
                    _ => break,
                };
                let m = ratio(&a, &b);
                if prev.as_ref().is_some_and(|p| m >= *p) {
                    return Ok(cond.fail(format!("|c_n| is not strictly decreasing at n = {n}")));
                }
                cond.values.push(IndexedValue { n, value: Q(m.clone()) });
                cond.to = n;
                prev = Some(m);
            }
            if cond.values.len() < 2 {
                return Ok(cond.fail("too few terms within the bit budget"));
            }
            cond.values.clear();
            cond.holds = true;
            cond.detail = format!(
                "|c_n| strictly decreasing on {}..={}: each tail pairs into same-signed differences",
                start, cond.to
            );
            Ok(cond)
        }
        SignMode::General { .. } => Err(CriteriaError::UnsupportedSignMode),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use crate::series::{term, Envelope};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn opts(prefix: u64) -> CheckOptions {
        CheckOptions::with_prefix(prefix)
    }

    #[test]
    fn divisibility_examples() {
        let ex2 = SeriesSpec::parse("n^4", "(n!)^5").unwrap();
        let c = check_divisibility_chain(&ex2, &opts(10)).unwrap();
        assert!(c.holds);
        assert_eq!((c.from, c.to), (1, 10));

        let odd = SeriesSpec::parse("1", "2*n + 1").unwrap();
        let c = check_divisibility_chain(&odd, &opts(2)).unwrap();
        assert!(!c.holds);
        assert!(c.detail.contains("b(1)"));

        let tower = SeriesSpec::parse("1", "tower(2, 2*n, 2*n)").unwrap();
        let c = check_divisibility_chain(&tower, &opts(2)).unwrap();
        assert!(c.holds);
        assert_eq!(c.to, 2);
        // beyond the budget the exponents are compared instead
        let c = check_divisibility_chain(&tower, &opts(4)).unwrap();
        assert!(c.holds, "{c:?}");
        assert_eq!(c.to, 4);
    }

    #[test]
    fn exponent_comparison_detects_failure() {
        // exponents shrink past the budget, so b(1) does not divide b(2)
        let spec = SeriesSpec::parse("1", "2^(2^(30 - n))").unwrap();
        let c = check_divisibility_chain(&spec, &opts(3)).unwrap();
        assert!(!c.holds);
    }

    #[test]
    fn weighted_ratio_examples() {
        let e = SeriesSpec::parse("1", "n!").unwrap().starting_at(0);
        assert_eq!(weighted_ratio(&e, 9, &EvalConfig::default()).unwrap(), q("1/10"));
        let c = check_weighted_ratio_limit(&e, &opts(12)).unwrap();
        assert!(c.holds);
        assert_eq!(c.value_at(12), Some(&q("1/13")));

        let ex2 = SeriesSpec::parse("n^4", "(n!)^5").unwrap();
        for n in 1..10 {
            assert_eq!(
                weighted_ratio(&ex2, n, &EvalConfig::default()).unwrap(),
                BigRational::new(1.into(), (n + 1).into())
            );
        }

        let remark = SeriesSpec::parse("n + 1", "n!").unwrap().starting_at(0);
        let c = check_weighted_ratio_limit(&remark, &opts(12)).unwrap();
        assert!(!c.holds);
        for v in &c.values {
            assert_eq!(v.value.0, BigRational::new((v.n + 2).into(), (v.n + 1).into()));
        }

        let geo = SeriesSpec::parse("1", "2^n").unwrap();
        assert!(!check_weighted_ratio_limit(&geo, &opts(12)).unwrap().holds);
    }

    #[test]
    fn weighted_ratio_stops_at_budget() {
        let liouville = SeriesSpec::parse("1", "10^(n!)").unwrap();
        let c = check_weighted_ratio_limit(&liouville, &opts(12)).unwrap();
        assert!(c.holds);
        assert!(c.to < 12);
        assert!(c.detail.contains("bit budget"));
    }

    #[test]
    fn envelope_upgrades_strength() {
        let e = SeriesSpec::parse("1", "n!").unwrap().starting_at(0);
        let mut o = opts(12);
        o.envelope = Some(Envelope {
            numer: "1".parse().unwrap(),
            denom: "n + 1".parse().unwrap(),
        });
        let c = check_weighted_ratio_limit(&e, &o).unwrap();
        assert_eq!(c.strength, Strength::EnvelopeCertified);
        o.envelope = Some(Envelope {
            numer: "1".parse().unwrap(),
            denom: "n + 2".parse().unwrap(),
        });
        let c = check_weighted_ratio_limit(&e, &o).unwrap();
        assert_eq!(c.strength, Strength::ProvenOnPrefix);
        assert!(c.detail.contains("rejected"));
    }

    #[test]
    fn tail_examples() {
        let sin_half = SeriesSpec::parse("1", "(2*n - 1)!*2^(2*n - 1)")
            .unwrap()
            .with_sign(SignMode::Alternating { first_positive: true });
        assert!(check_tail_nonvanishing(&sin_half, &opts(12)).unwrap().holds);
        // the odd-N pairing from the sine series: c_N + c_{N+1} > 0
        let cfg = EvalConfig::default();
        for n in (1..10).step_by(2) {
            let pair = term(&sin_half, n, &cfg).unwrap().value() + term(&sin_half, n + 1, &cfg).unwrap().value();
            assert!(pair > BigRational::zero());
        }
        let pos = SeriesSpec::parse("1", "n!").unwrap();
        assert!(check_tail_nonvanishing(&pos, &opts(5)).unwrap().holds);
        let wobbly = SeriesSpec::parse("1", "n*n + 5 - 4*n")
            .unwrap()
            .with_sign(SignMode::Alternating { first_positive: true });
        assert!(!check_tail_nonvanishing(&wobbly, &opts(8)).unwrap().holds);
        let general = pos.with_sign(SignMode::General {
            negative: vec![false, true, true],
        });
        assert_eq!(
            check_tail_nonvanishing(&general, &opts(5)),
            Err(CriteriaError::UnsupportedSignMode)
        );
    }

    fn arb_spec() -> impl Strategy<Value = SeriesSpec> {
        let numer = prop::sample::select(vec!["1", "n", "n + 1", "n^2", "3^n", "2*n + 7"]);
        let denom = prop::sample::select(vec!["n!", "2^n", "(n!)^2", "3^(n*n)", "n + 1", "(2*n)!*5^n"]);
        (numer, denom).prop_map(|(a, b)| SeriesSpec::parse(a, b).unwrap())
    }

    proptest! {
        #[test]
        fn weighted_ratio_identity(spec in arb_spec(), n in 1u64..25) {
            let cfg = EvalConfig::default();
            let c0 = term(&spec, n, &cfg).unwrap();
            let c1 = term(&spec, n + 1, &cfg).unwrap();
            let via_terms = BigRational::from_integer(BigInt::from(c0.a.clone())) * (c1.value() / c0.value());
            prop_assert!(!via_terms.is_zero());
            prop_assert_eq!(via_terms, weighted_ratio(&spec, n, &cfg).unwrap());
        }
    }
}
