//! Cross-module invariants checked against the oracle.

use irrat_core::catalog::{builtin, list_builtins, Params};
use irrat_core::criteria::{check_growth_approx, classify_geometric_poly, CheckOptions, GrowthFn, PolyExp, Verdict};
use irrat_core::oracle::{brute_sum, convergents, verify_witness};
use irrat_core::seqexpr::EvalConfig;
use irrat_core::series::{enclose, partial_sum, Enclosure};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

#[test]
fn brute_sum_equals_partial_sum_on_catalog() {
    let cfg = cfg();
    for e in list_builtins() {
        let Some(top) = e.exact_range(&cfg, 30) else { continue };
        for n in e.spec.start_index..=top {
            assert_eq!(
                brute_sum(&e.spec, n, &cfg).unwrap(),
                partial_sum(&e.spec, n, &cfg).unwrap(),
                "{} at N = {n}",
                e.name
            );
        }
    }
}

/// `max |θ - x|` over the enclosure.
fn far(enc: &Enclosure, x: &BigRational) -> BigRational {
    (&enc.lo.0 - x).abs().max((&enc.hi.0 - x).abs())
}

#[test]
fn convergent_law_holds_against_enclosures() {
    let cfg = cfg();
    for (name, p) in [
        ("e", vec![]),
        ("sin_recip", vec![("r", "1")]),
        ("three_pow", vec![]),
        ("n4_fact5", vec![]),
    ] {
        let params: Params = p.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        let entry = builtin(name, &params).unwrap();
        let enc = enclose(&entry.spec, 80, &cfg).unwrap();
        let cv = convergents(&enc, 20);
        assert!(
            cv.convergents.len() >= 8,
            "{name}: only {} convergents",
            cv.convergents.len()
        );
        for w in cv.convergents.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert!(
                b.q > a.q || (a.index == 0 && b.q >= a.q),
                "{name}: denominators must increase"
            );
            let bound = BigRational::new(BigInt::one(), BigInt::from(&a.q * &b.q));
            assert!(
                far(&enc, &a.value()) < bound,
                "{name}: convergent {} breaks the gap law",
                a.index
            );
            // alternate sides of θ
            let below_a = a.value() < enc.lo.0;
            let below_b = b.value() < enc.lo.0;
            let outside = |x: &BigRational| *x < enc.lo.0 || *x > enc.hi.0;
            if outside(&a.value()) && outside(&b.value()) {
                assert_ne!(
                    below_a, below_b,
                    "{name}: convergents {} and {} on one side",
                    a.index, b.index
                );
            }
        }
    }
}

#[test]
fn growth_witnesses_pass_the_oracle() {
    let cfg = cfg();
    let spec = builtin("liouville_cubic", &Params::new()).unwrap().spec;
    let f = GrowthFn::parse("b^3").unwrap();
    let (cert, witnesses) = check_growth_approx(&spec, &f, &CheckOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Irrational);
    assert!(witnesses.len() >= 3);
    let enc = enclose(&spec, 2000, &cfg).unwrap();
    let mut verified = 0;
    for w in &witnesses {
        let p = BigInt::from(w.p.clone());
        match verify_witness(&enc, &p, &w.q, &f, w.n, &cfg) {
            Ok(ok) => {
                assert!(ok, "witness n = {} rejected", w.n);
                verified += 1;
            }
            // f(q) is far below the enclosure width for the largest n
            Err(_) => assert!(w.f_q.bits() > 6000, "witness n = {} undecided", w.n),
        }
    }
    assert!(verified >= 4, "{verified}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// The enclosure of a linear geometric series contains its closed form.
    #[test]
    fn geometric_enclosure_contains_closed_form(a in 2u64..8, b0 in 1u64..6, b1 in 0u64..6, digits in 5u32..40) {
        let p = PolyExp::new(a, vec![b0, b1]).unwrap();
        let cert = classify_geometric_poly(&p, &CheckOptions::default()).unwrap();
        let Verdict::Rational(v) = cert.verdict else { panic!("not rational") };
        let enc = enclose(&p.to_spec(), digits, &cfg()).unwrap();
        prop_assert!(enc.contains(&v.0));
    }

    /// A definite verdict comes only with every condition holding.
    #[test]
    fn definite_verdicts_have_all_conditions(k in 1u64..5, shift in 0u64..4) {
        let spec = irrat_core::series::SeriesSpec::parse("1", &format!("(n + {shift})!^{k}")).unwrap();
        let cert = irrat_core::criteria::classify_irrational(&spec, &CheckOptions::with_prefix(8)).unwrap();
        if cert.verdict.is_definite() {
            prop_assert!(cert.conditions.iter().all(|c| c.holds));
        }
        let min = cert.conditions.iter().map(|c| c.strength).min().unwrap();
        prop_assert_eq!(cert.strength, min);
    }
}
