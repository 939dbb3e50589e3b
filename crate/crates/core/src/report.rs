//! Classification and evaluation reports: one value rendered either as JSON
//! or as text carrying the same facts.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::Params;
use crate::criteria::{ApproximationWitness, Certificate, Verdict};
use crate::series::{Enclosure, SignMode, Strength};

/// Exit status for a definite verdict (or a plain evaluation).
pub const EXIT_DEFINITE: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub numer: String,
    pub denom: String,
    pub sign: SignMode,
    pub start: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
    /// Which criterion ran, e.g. `irrational` or `roth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<String>,
    pub prefix: u64,
    pub bit_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnclosureReport {
    #[serde(flatten)]
    pub enclosure: Enclosure,
    pub digits: u32,
    /// Certified truncated decimal, when the enclosure is narrow enough.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimal: Option<String>,
}

/// One row of the `eval` term table. Large integers use [`compact_uint`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRow {
    pub n: u64,
    pub a: String,
    pub b: String,
    pub c: String,
    /// Weighted ratio `a_n b_{n-1} / b_n`; absent for the first row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    pub partial_sum: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input: InputEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enclosure: Option<EnclosureReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<ApproximationWitness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub timing_ms: u64,
    pub banner: String,
}

pub fn sign_text(mode: &SignMode) -> String {
    match mode {
        SignMode::AllPositive => "positive".into(),
        SignMode::Alternating { first_positive: true } => "alternating".into(),
        SignMode::Alternating { first_positive: false } => "alternating-negative".into(),
        SignMode::General { negative } => {
            let pat: String = negative.iter().map(|&m| if m { '-' } else { '+' }).collect();
            format!("pattern:{pat}")
        }
    }
}

/// One-line summary of a certificate.
pub fn banner_for(cert: Option<&Certificate>) -> String {
    let Some(c) = cert else {
        return "evaluation only (no classification)".into();
    };
    let verdict = match &c.verdict {
        Verdict::Rational(q) => format!("Rational {}", exact_rational(&q.0)),
        other => other.kind().to_string(),
    };
    let mut s = format!("{verdict} by {} [{}]", c.theorem, c.strength);
    if c.verdict.is_definite() && c.strength == Strength::EvidenceOnly {
        s.push_str(" WARNING: rests on evidence-only conditions, not a proof");
    }
    s
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match &self.certificate {
            Some(c) if !c.verdict.is_definite() => EXIT_INCONCLUSIVE,
            _ => EXIT_DEFINITE,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let i = &self.input;
        let _ = writeln!(out, "command: {}", self.command);
        let _ = write!(
            out,
            "input: numer = {}, denom = {}, sign = {}, start = {}",
            i.numer,
            i.denom,
            sign_text(&i.sign),
            i.start
        );
        if let Some(b) = &i.builtin {
            let _ = write!(out, ", builtin = {b}");
        }
        for (k, v) in &i.params {
            let _ = write!(out, ", {k} = {v}");
        }
        out.push('\n');
        if let Some(c) = &i.criterion {
            let _ = writeln!(out, "criterion: {c}");
        }
        let _ = writeln!(out, "prefix: {}, bit budget: {}", i.prefix, i.bit_budget);
        let _ = writeln!(out, "result: {}", self.banner);

        if let Some(cert) = &self.certificate {
            let _ = writeln!(
                out,
                "certificate: theorem {}, verdict {}, strength {}",
                cert.theorem, cert.verdict, cert.strength
            );
            for cond in &cert.conditions {
                let range = format!("n = {}..{}", cond.from, cond.to);
                let _ = writeln!(
                    out,
                    "  condition {}: {} ({range}, {})",
                    cond.name,
                    if cond.holds { "holds" } else { "fails" },
                    cond.strength
                );
                if !cond.detail.is_empty() {
                    let _ = writeln!(out, "    {}", cond.detail);
                }
                for v in &cond.values {
                    let _ = writeln!(out, "    n = {}: {}", v.n, exact_rational(&v.value.0));
                }
            }
            for note in &cert.notes {
                let _ = writeln!(out, "  note: {note}");
            }
        }

        if !self.terms.is_empty() {
            let _ = writeln!(out, "terms:");
            for r in &self.terms {
                let _ = writeln!(
                    out,
                    "  n = {}: a = {}, b = {}, c = {}, q = {}, S = {}",
                    r.n,
                    r.a,
                    r.b,
                    r.c,
                    r.q.as_deref().unwrap_or("-"),
                    r.partial_sum
                );
            }
        }

        if let Some(e) = &self.enclosure {
            let enc = &e.enclosure;
            let _ = writeln!(
                out,
                "enclosure: [{}, {}]",
                exact_rational(&enc.lo.0),
                exact_rational(&enc.hi.0)
            );
            let _ = writeln!(
                out,
                "  tail bound {} from n = {}, {}",
                exact_rational(&enc.tail_bound.0),
                enc.certified_from,
                enc.strength
            );
            match &e.decimal {
                Some(d) => {
                    let _ = writeln!(out, "  decimal ({} digits): {d}", e.digits);
                }
                None => {
                    let _ = writeln!(out, "  decimal ({} digits): not certified", e.digits);
                }
            }
        }

        for w in &self.witnesses {
            let _ = writeln!(
                out,
                "witness n = {}: p = {}, q = {}, f(q) = {}, gap < {}",
                w.n,
                w.p,
                w.q,
                w.f_q,
                exact_rational(&w.gap_bound.0)
            );
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        let _ = writeln!(out, "timing: {} ms", self.timing_ms);
        out
    }
}

/// Exact `p/q` (or `p` for integers), as in the JSON form.
pub fn show_rational(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// `base^k` when `v` is a perfect power of a base in 2..=16 with `k > 1`.
pub fn power_form(v: &BigUint) -> Option<(u32, u32)> {
    let bits = v.bits();
    if bits < 2 {
        return None;
    }
    for base in 2u32..=16 {
        let lb = (base as f64).log2();
        let guess = ((bits - 1) as f64 / lb).floor() as u32;
        for k in guess.saturating_sub(1)..=guess + 1 {
            if k > 1 && BigUint::from(base).pow(k) == *v {
                return Some((base, k));
            }
        }
    }
    None
}

/// Lossless short form: values above 128 bits that are perfect powers print
/// as `base^k`, everything else in full decimal.
pub fn exact_uint(v: &BigUint) -> String {
    match power_form(v) {
        Some((b, k)) if v.bits() > 128 => format!("{b}^{k}"),
        _ => v.to_string(),
    }
}

/// [`show_rational`] with [`exact_uint`] on both sides.
pub fn exact_rational(v: &BigRational) -> String {
    let sign = if v.numer().sign() == num_bigint::Sign::Minus {
        "-"
    } else {
        ""
    };
    let n = exact_uint(v.numer().magnitude());
    if v.denom().is_one() {
        format!("{sign}{n}")
    } else {
        format!("{sign}{n}/{}", exact_uint(v.denom().magnitude()))
    }
}

/// Decimal for values up to 128 bits; above that `base^k (N bits)` for
/// perfect powers, else a leading-digit approximation.
pub fn compact_uint(v: &BigUint) -> String {
    let bits = v.bits();
    if bits <= 128 {
        return v.to_string();
    }
    if let Some((base, k)) = power_form(v) {
        return format!("{base}^{k} ({bits} bits)");
    }
    // log10 from the top 64 bits.
    let shift = bits - 64;
    let top = (v >> shift).to_f64().unwrap_or(0.0);
    let log10 = top.log10() + shift as f64 * std::f64::consts::LOG10_2;
    let exp = log10.floor();
    let mant = 10f64.powf(log10 - exp);
    format!("~{mant:.6}e{exp} ({bits} bits)")
}

/// `a/b` with both sides through [`compact_uint`]; signs come from `negative`.
pub fn compact_fraction(num: &BigUint, den: &BigUint, negative: bool) -> String {
    let sign = if negative && !num.is_zero() { "-" } else { "" };
    if den.is_one() {
        format!("{sign}{}", compact_uint(num))
    } else {
        format!("{sign}{}/{}", compact_uint(num), compact_uint(den))
    }
}

pub fn compact_rational(v: &BigRational) -> String {
    let neg = v.numer().sign() == num_bigint::Sign::Minus;
    compact_fraction(v.numer().magnitude(), v.denom().magnitude(), neg)
}
