use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn expr(s: &str) -> SequenceExpr {
    SequenceExpr::parse(s).unwrap()
}

fn mag(s: &str, n: u64) -> Magnitude {
    magnitude_of(&expr(s), n, &EvalConfig::default()).unwrap()
}

/// Magnitude forced onto the log path by a tiny exact budget.
fn mag_small(s: &str, n: u64) -> Magnitude {
    magnitude_of(&expr(s), n, &EvalConfig::with_bit_budget(8)).unwrap()
}

fn contains_level0(m: &Magnitude, v: &BigUint) -> bool {
    let (lo, hi) = m.interval();
    match m.level() {
        0 => {
            let d = Dyadic::from_biguint(v);
            *lo <= d && d <= *hi
        }
        1 => {
            // bits(v) - 1 <= log2 v < bits(v)
            let b = v.bits() as i64;
            *lo < Dyadic::from_i64(b) && Dyadic::from_i64(b - 1) <= *hi
        }
        _ => panic!("unexpected level {}", m.level()),
    }
}

#[test]
fn exact_when_within_budget() {
    let m = mag("2^(2^n)", 6);
    assert_eq!(m.level(), 0);
    assert_eq!(m.exact_value(), Some(&(BigUint::one() << 64usize)));
    assert_eq!(mag("n!", 5).exact_value(), Some(&BigUint::from(120u32)));
}

#[test]
fn tower_at_three_is_a_high_level_interval() {
    // f_6 with top 6: log2 log2 log2 f_6 = f_3 = 2^64
    let m = mag("tower(2,2*n,2*n)", 3);
    assert!(m.level() >= 2, "level {}", m.level());
    let target = Dyadic::pow2(64);
    assert!(*m.lo() <= target && target <= *m.hi(), "{m:?}");
    assert!(m.lo().to_f64() > 1.8446743e19 && m.hi().to_f64() < 1.8446745e19);
}

#[test]
fn compare_examples() {
    let a = mag("2^(2^64)", 1);
    let b = mag("10^(10^18)", 1);
    assert_eq!(compare(&a, &b), Certainty::ProvenAtOrAbove);
    assert_eq!(compare(&b, &a), Certainty::ProvenBelow);
    let seven = Magnitude::from_u64(7);
    assert_eq!(compare(&seven, &seven), Certainty::ProvenAtOrAbove);
    let lhs = Magnitude::exact(BigUint::from(4u32).pow(15) * 2u32);
    let rhs = mag("2^65536", 1);
    assert_eq!(compare(&lhs, &rhs), Certainty::ProvenBelow);
    // same comparison through the log path
    assert_eq!(
        compare(&mag_small("4^15*2", 1), &mag_small("2^65536", 1)),
        Certainty::ProvenBelow
    );
}

#[test]
fn ratio_below_half_examples() {
    let cfg = EvalConfig::default();
    let num = Magnitude::exact(BigUint::from(4u32).pow(15));
    assert_eq!(ratio_below_half(&num, &mag("2^65536", 1), &cfg), Certainty::ProvenBelow);
    assert_eq!(
        ratio_below_half(&Magnitude::from_u64(1), &Magnitude::from_u64(2), &cfg),
        Certainty::ProvenAtOrAbove
    );
    let den = Magnitude::exact(BigUint::from(10u32).pow(48));
    assert_eq!(
        ratio_below_half(&Magnitude::from_u64(1), &den, &cfg),
        Certainty::ProvenBelow
    );
    let small = EvalConfig::with_bit_budget(8);
    assert_eq!(
        ratio_below_half(&mag_small("1", 1), &mag_small("10^48", 1), &small),
        Certainty::ProvenBelow
    );
}

#[test]
fn tower_levels_are_capped() {
    let err = magnitude_of(&expr("tower(2,2*n,2*n)"), 6, &EvalConfig::default()).unwrap_err();
    assert_eq!(err, MagnitudeError::LevelCap);
}

#[test]
fn subtraction_of_one_from_huge_power() {
    let cfg = EvalConfig::default();
    let big = mag("2^(2^65536)", 1);
    let less = big.sub(&Magnitude::from_u64(1), &cfg).unwrap();
    assert_eq!(compare(&less, &big), Certainty::Unknown);
    assert_eq!(compare(&less, &mag("2^(2^65535)", 1)), Certainty::ProvenAtOrAbove);
    assert!(matches!(
        Magnitude::from_u64(3).sub(&Magnitude::from_u64(3), &cfg),
        Err(MagnitudeError::Eval(EvalError::NonPositiveValue(_)))
    ));
}

#[test]
fn log_path_contains_exact_products() {
    let small = EvalConfig::with_bit_budget(8);
    let big = EvalConfig::default();
    for s in [
        "3^100 * 7^40",
        "5^(3^4)",
        "(300)!",
        "tower(3, 3, 2) + 2^100",
        "2^200 - 3^20",
        "17^60 / 17^20",
    ] {
        let e = expr(s);
        let exact = e.eval(1, &big).unwrap();
        let m = magnitude_of(&e, 1, &small).unwrap_or_else(|err| panic!("{s}: {err}"));
        assert!(contains_level0(&m, &exact), "{s}: {m:?}");
    }
}

// Random power/tower expressions whose exact value stays below 4096 bits.
fn random_expr(rng: &mut impl Rng) -> String {
    match rng.gen_range(0..6) {
        0 => format!("{}^{}", rng.gen_range(2..50), rng.gen_range(1..300)),
        1 => format!(
            "{}^({}^{})",
            rng.gen_range(2..6),
            rng.gen_range(2..4),
            rng.gen_range(1..6)
        ),
        2 => format!(
            "tower({}, {}, {})",
            rng.gen_range(2..4),
            rng.gen_range(1..4),
            rng.gen_range(1..4)
        ),
        3 => format!(
            "{}^{} * {}^{}",
            rng.gen_range(2..30),
            rng.gen_range(1..200),
            rng.gen_range(2..30),
            rng.gen_range(1..200)
        ),
        4 => format!(
            "{}^{} + {}",
            rng.gen_range(2..30),
            rng.gen_range(1..300),
            rng.gen_range(1..1000)
        ),
        _ => format!("({})!", rng.gen_range(1..300)),
    }
}

#[test]
fn soundness_against_exact_comparison() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let small = EvalConfig::with_bit_budget(16);
    let big = EvalConfig::default();
    for _ in 0..200 {
        let (sa, sb) = (random_expr(&mut rng), random_expr(&mut rng));
        let (ea, eb) = (expr(&sa), expr(&sb));
        let (xa, xb) = (ea.eval(1, &big).unwrap(), eb.eval(1, &big).unwrap());
        let (Ok(ma), Ok(mb)) = (magnitude_of(&ea, 1, &small), magnitude_of(&eb, 1, &small)) else {
            continue;
        };
        match compare(&ma, &mb) {
            Certainty::ProvenBelow => assert!(xa < xb, "{sa} vs {sb}"),
            Certainty::ProvenAtOrAbove => assert!(xa >= xb, "{sa} vs {sb}"),
            Certainty::Unknown => {}
        }
    }
}

proptest! {
    #[test]
    fn level_raising_never_contradicts(a in 2u64..40, x in 1u64..400, b in 2u64..40, y in 1u64..400) {
        let small = EvalConfig::with_bit_budget(8);
        let ma = magnitude_of(&expr(&format!("{a}^{x}")), 1, &small).unwrap();
        let mb = magnitude_of(&expr(&format!("{b}^{y}")), 1, &small).unwrap();
        let base = ma.level().max(mb.level());
        let here = compare_at_level(&ma, &mb, base);
        let up = compare_at_level(&ma, &mb, base + 1);
        let contradictory = matches!(
            (here, up),
            (Certainty::ProvenBelow, Certainty::ProvenAtOrAbove) | (Certainty::ProvenAtOrAbove, Certainty::ProvenBelow)
        );
        prop_assert!(!contradictory);
    }

    #[test]
    fn log_space_multiplication_contains_exact(a in 2u64..1000, x in 1u32..60, b in 2u64..1000, y in 1u32..60) {
        let small = EvalConfig::with_bit_budget(8);
        let big = EvalConfig::default();
        let ma = Magnitude::exact(BigUint::from(a).pow(x));
        let mb = Magnitude::exact(BigUint::from(b).pow(y));
        let prod = ma.mul(&mb, &small).unwrap();
        let exact = BigUint::from(a).pow(x) * BigUint::from(b).pow(y);
        prop_assert!(contains_level0(&prod, &exact));
        let exact_prod = ma.mul(&mb, &big).unwrap();
        prop_assert_eq!(exact_prod.exact_value(), Some(&exact));
    }
}
