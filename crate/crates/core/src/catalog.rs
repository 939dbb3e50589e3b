//! Built-in series with known classifications. Names are stable CLI
//! identifiers.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::criteria::{
    run_check, Certificate, Check, CheckOptions, CriteriaError, GrowthFn, PolyExp, Theorem, VerdictKind,
};
use crate::rational::parse_rational;
use crate::seqexpr::EvalConfig;
use crate::series::{SeriesSpec, SignMode, Strength};

pub type Params = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown built-in series {0:?}")]
    UnknownName(String),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: String,
    pub spec: SeriesSpec,
    pub check: Check,
    /// Parameters after defaults were applied.
    pub params: Params,
    pub expected: (VerdictKind, Theorem),
    /// Expected certificate strength when it differs from exact checking.
    pub expected_strength: Strength,
    pub notes: &'static str,
}

impl CatalogEntry {
    pub fn classify(&self, opts: &CheckOptions) -> Result<Certificate, CriteriaError> {
        run_check(&self.check, &self.spec, opts)
    }

    /// Largest `n <= cap` such that `a_k` and `b_k` evaluate exactly for all
    /// `start <= k <= n`.
    pub fn exact_range(&self, cfg: &EvalConfig, cap: u64) -> Option<u64> {
        let mut last = None;
        for n in self.spec.start_index..=cap {
            if self.spec.numer.eval(n, cfg).is_err() || self.spec.denom.eval(n, cfg).is_err() {
                break;
            }
            last = Some(n);
        }
        last
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "e",
    "n4_fact5",
    "sin_recip",
    "liouville_sum_pair",
    "prime_tower",
    "liouville10",
    "liouville_cubic",
    "three_pow",
    "cremer_tower",
    "geometric_poly_linear",
    "geometric_poly_square",
    "geometric_half",
    "remark_2e",
];

fn spec(numer: &str, denom: &str) -> SeriesSpec {
    SeriesSpec::parse(numer, denom).expect("built-in expressions parse")
}

fn param_u64(params: &Params, name: &str, default: u64, min: u64) -> Result<u64, CatalogError> {
    let Some(text) = params.get(name) else {
        return Ok(default);
    };
    let v: u64 = text.trim().parse().map_err(|_| CatalogError::InvalidParam {
        name: name.into(),
        reason: format!("{text:?} is not a non-negative integer"),
    })?;
    if v < min {
        return Err(CatalogError::InvalidParam {
            name: name.into(),
            reason: format!("must be at least {min}"),
        });
    }
    Ok(v)
}

fn param_rational(params: &Params, name: &str, default: &str) -> Result<BigRational, CatalogError> {
    let text = params.get(name).map(String::as_str).unwrap_or(default);
    parse_rational(text)
        .filter(|v| *v > BigRational::from_integer(0.into()))
        .ok_or_else(|| CatalogError::InvalidParam {
            name: name.into(),
            reason: format!("{text:?} is not a positive rational"),
        })
}

fn reject_unknown(params: &Params, allowed: &[&str]) -> Result<(), CatalogError> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CatalogError::InvalidParam {
            name: k.clone(),
            reason: "not accepted by this series".into(),
        }),
        None => Ok(()),
    }
}

/// Builds the named entry; `params` override the defaults.
pub fn builtin(name: &str, params: &Params) -> Result<CatalogEntry, CatalogError> {
    let mut used = Params::new();
    let entry = |name: &'static str,
                 description: String,
                 spec: SeriesSpec,
                 check: Check,
                 params: Params,
                 expected: (VerdictKind, Theorem)| CatalogEntry {
        name,
        description,
        spec,
        check,
        params,
        expected,
        expected_strength: Strength::ProvenOnPrefix,
        notes: "",
    };
    use Theorem::*;
    use VerdictKind::*;
    let e = match name {
        "e" => {
            reject_unknown(params, &[])?;
            entry(
                "e",
                "Σ_{n>=0} 1/n! = e".into(),
                spec("1", "n!").starting_at(0),
                Check::Irrational,
                used,
                (Irrational, T2),
            )
        }
        "n4_fact5" => {
            reject_unknown(params, &[])?;
            entry(
                "n4_fact5",
                "Σ n^4/(n!)^5".into(),
                spec("n^4", "(n!)^5"),
                Check::Irrational,
                used,
                (Irrational, T2),
            )
        }
        "sin_recip" => {
            reject_unknown(params, &["r"])?;
            let r = param_u64(params, "r", 1, 1)?;
            used.insert("r".into(), r.to_string());
            let s = spec("1", &format!("(2*n - 1)!*{r}^(2*n - 1)"))
                .with_sign(SignMode::Alternating { first_positive: true });
            entry(
                "sin_recip",
                format!("sin(1/{r}) as an alternating series"),
                s,
                Check::Irrational,
                used,
                (Irrational, T1),
            )
        }
        "liouville_sum_pair" => {
            reject_unknown(params, &[])?;
            let beta = spec("1", "3^(n!)");
            entry(
                "liouville_sum_pair",
                "Σ 1/2^(n!) + Σ 1/3^(n!)".into(),
                spec("1", "2^(n!)"),
                Check::SumPair(Box::new(beta)),
                used,
                (Irrational, T3),
            )
        }
        "prime_tower" => {
            reject_unknown(params, &[])?;
            let mut e = entry(
                "prime_tower",
                "Σ 1/p_k with k = 2^(2^(n!))".into(),
                spec("1", "nthprime(2^(2^(n!)))"),
                Check::Lcm,
                used,
                (Irrational, T4),
            );
            e.expected_strength = Strength::EvidenceOnly;
            e.notes = "exact primes only for n <= 2; larger n use prime-counting bounds (Evidence-only)";
            e
        }
        "liouville10" => {
            reject_unknown(params, &["epsilon"])?;
            let eps = param_rational(params, "epsilon", "1")?;
            used.insert("epsilon".into(), crate::rational::describe(&eps));
            entry(
                "liouville10",
                "Σ 1/10^(n!)".into(),
                spec("1", "10^(n!)"),
                Check::Roth(eps),
                used,
                (Transcendental, T7),
            )
        }
        "liouville_cubic" => {
            reject_unknown(params, &[])?;
            let f = GrowthFn::parse("b^3").expect("built-in growth function parses");
            entry(
                "liouville_cubic",
                "Σ 1/10^(n!) with approximations of order f(b) = b^3".into(),
                spec("1", "10^(n!)"),
                Check::Growth(f),
                used,
                (Irrational, T6),
            )
        }
        "three_pow" => {
            reject_unknown(params, &["epsilon"])?;
            let eps = param_rational(params, "epsilon", "2/3")?;
            used.insert("epsilon".into(), crate::rational::describe(&eps));
            entry(
                "three_pow",
                "Σ 3^n/2^(3^n)".into(),
                spec("3^n", "2^(3^n)"),
                Check::Roth(eps),
                used,
                (Transcendental, T7),
            )
        }
        "cremer_tower" => {
            reject_unknown(params, &["d"])?;
            let d = param_u64(params, "d", 2, 2)?;
            if d > 1 << 16 {
                return Err(CatalogError::InvalidParam {
                    name: "d".into(),
                    reason: "must be at most 65536".into(),
                });
            }
            used.insert("d".into(), d.to_string());
            let mut e = entry(
                "cremer_tower",
                format!("Σ 1/b_n with b_n = tower({d}, 2n, {d}n)"),
                spec("1", &format!("tower({d}, 2*n, {d}*n)")),
                Check::Cremer(d as u32),
                used,
                (CremerConditionHolds, T8),
            );
            e.notes = "denominators beyond n = 2 exist only as magnitudes";
            e
        }
        "geometric_poly_linear" | "geometric_poly_square" => {
            reject_unknown(params, &["a"])?;
            let a = param_u64(params, "a", 2, 2)?;
            used.insert("a".into(), a.to_string());
            let (coeffs, expected, label) = if name == "geometric_poly_linear" {
                (vec![1, 1], (Rational, T5), "geometric_poly_linear")
            } else {
                (vec![1, 0, 0], (Irrational, T5), "geometric_poly_square")
            };
            let poly = PolyExp::new(a, coeffs).map_err(|e| CatalogError::InvalidParam {
                name: "a".into(),
                reason: e.to_string(),
            })?;
            let s = poly.to_spec();
            entry(
                label,
                format!("Σ 1/{a}^({})", poly.poly_text()),
                s,
                Check::GeometricPoly(poly),
                used,
                expected,
            )
        }
        "geometric_half" => {
            reject_unknown(params, &[])?;
            let mut e = entry(
                "geometric_half",
                "Σ 1/2^n = 1 (rational control)".into(),
                spec("1", "2^n"),
                Check::Irrational,
                used,
                (Inconclusive, T2),
            );
            e.notes = "negative control: the weighted ratio stays at 1/2";
            e
        }
        "remark_2e" => {
            reject_unknown(params, &[])?;
            let mut e = entry(
                "remark_2e",
                "Σ_{n>=0} (n+1)/n! = 2e (criterion not applicable)".into(),
                spec("n + 1", "n!").starting_at(0),
                Check::Irrational,
                used,
                (Inconclusive, T2),
            );
            e.notes = "negative control: q_n = (n+2)/(n+1) does not tend to 0";
            e
        }
        other => return Err(CatalogError::UnknownName(other.to_string())),
    };
    Ok(e)
}

/// Every built-in with default parameters, in a fixed order.
pub fn list_builtins() -> Vec<CatalogEntry> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n, &Params::new()).expect("defaults are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with(k: &str, v: &str) -> Params {
        let mut p = Params::new();
        p.insert(k.into(), v.into());
        p
    }

    #[test]
    fn builtin_examples() {
        let e = builtin("e", &Params::new()).unwrap();
        assert_eq!(e.spec.start_index, 0);
        assert_eq!(e.spec.denom.to_string(), "n!");
        assert_eq!(e.expected, (VerdictKind::Irrational, Theorem::T2));

        let s = builtin("sin_recip", &with("r", "3")).unwrap();
        assert!(matches!(s.spec.sign_mode, SignMode::Alternating { .. }));
        assert_eq!(s.expected.1, Theorem::T1);

        let c = builtin("cremer_tower", &with("d", "2")).unwrap();
        assert_eq!(c.spec.denom.to_string(), "tower(2, 2*n, 2*n)");
        assert_eq!(c.expected, (VerdictKind::CremerConditionHolds, Theorem::T8));
    }

    #[test]
    fn builtin_errors() {
        assert!(matches!(
            builtin("pi", &Params::new()),
            Err(CatalogError::UnknownName(_))
        ));
        assert!(matches!(
            builtin("sin_recip", &with("r", "0")),
            Err(CatalogError::InvalidParam { .. })
        ));
        assert!(matches!(
            builtin("cremer_tower", &with("d", "1")),
            Err(CatalogError::InvalidParam { .. })
        ));
        assert!(matches!(
            builtin("e", &with("r", "2")),
            Err(CatalogError::InvalidParam { .. })
        ));
        assert!(matches!(
            builtin("three_pow", &with("epsilon", "-1")),
            Err(CatalogError::InvalidParam { .. })
        ));
    }

    #[test]
    fn listing() {
        let all = list_builtins();
        let names: Vec<_> = all.iter().map(|e| e.name).collect();
        assert_eq!(names, BUILTIN_NAMES);
        assert!(names.contains(&"e"));
        let pt = all.iter().find(|e| e.name == "prime_tower").unwrap();
        assert!(pt.notes.contains("n <= 2"));
        assert_eq!(pt.exact_range(&EvalConfig::default(), 5), Some(2));
        let remark = all.iter().find(|e| e.name == "remark_2e").unwrap();
        assert_eq!(remark.expected.0, VerdictKind::Inconclusive);
    }

    #[test]
    fn every_entry_reproduces_its_expectation() {
        for entry in list_builtins() {
            let cert = entry.classify(&CheckOptions::default()).unwrap();
            assert_eq!((cert.verdict.kind(), cert.theorem), entry.expected, "{}", entry.name);
            if cert.verdict.is_definite() {
                assert_eq!(cert.strength, entry.expected_strength, "{}", entry.name);
            }
        }
    }
}
