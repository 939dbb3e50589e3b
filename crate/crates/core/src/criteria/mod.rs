//! Hypothesis checkers for the irrationality, transcendence and Cremer
//! criteria. Every checker works over a finite prefix and grades what it
//! established with a [`Strength`].

mod approx;
mod classify;
mod conditions;

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::rational::{parse_rational, Q};
use crate::seqexpr::{EvalConfig, EvalError, SequenceExpr};
use crate::series::{Envelope, SeriesError, SeriesSpec, Strength};

pub use approx::{check_cremer_condition, check_growth_approx, check_roth_transcendence, ApproximationWitness};
pub use classify::{
    check_lcm_criterion, check_sum_pair, classify_geometric_poly, classify_irrational, combined_spec, PolyExp,
};
pub use conditions::{check_divisibility_chain, check_tail_nonvanishing, check_weighted_ratio_limit, weighted_ratio};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum Verdict {
    Rational(Q),
    Irrational,
    Transcendental,
    CremerConditionHolds,
    Inconclusive,
}

/// A verdict without its payload, for comparing against expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    Rational,
    Irrational,
    Transcendental,
    CremerConditionHolds,
    Inconclusive,
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Rational(_) => VerdictKind::Rational,
            Verdict::Irrational => VerdictKind::Irrational,
            Verdict::Transcendental => VerdictKind::Transcendental,
            Verdict::CremerConditionHolds => VerdictKind::CremerConditionHolds,
            Verdict::Inconclusive => VerdictKind::Inconclusive,
        }
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Rational(v) => write!(f, "Rational({v})"),
            other => write!(f, "{}", other.kind()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedValue {
    pub n: u64,
    pub value: Q,
}

/// One hypothesis, checked over the indices `from..=to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub from: u64,
    pub to: u64,
    pub strength: Strength,
    /// Exact values of the tested quantity, when it is a rational sequence.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<IndexedValue>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Condition {
    fn new(name: &str, from: u64) -> Condition {
        Condition {
            name: name.to_string(),
            holds: false,
            from,
            to: from,
            strength: Strength::ProvenOnPrefix,
            values: Vec::new(),
            detail: String::new(),
        }
    }

    fn fail(mut self, detail: impl Into<String>) -> Condition {
        self.holds = false;
        self.detail = detail.into();
        self
    }

    pub fn value_at(&self, n: u64) -> Option<&BigRational> {
        self.values.iter().find(|v| v.n == n).map(|v| &v.value.0)
    }

    fn push(&mut self, n: u64, v: BigRational) {
        self.values.push(IndexedValue { n, value: Q(v) });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem: Theorem,
    pub verdict: Verdict,
    pub strength: Strength,
    pub conditions: Vec<Condition>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    /// Assembles a certificate: the verdict stands only if every condition
    /// holds, and the strength is that of the weakest condition.
    pub fn assemble(theorem: Theorem, verdict: Verdict, conditions: Vec<Condition>, notes: Vec<String>) -> Certificate {
        let strength = conditions
            .iter()
            .map(|c| c.strength)
            .min()
            .unwrap_or(Strength::EvidenceOnly);
        let verdict = if conditions.iter().all(|c| c.holds) {
            verdict
        } else {
            Verdict::Inconclusive
        };
        Certificate {
            theorem,
            verdict,
            strength,
            conditions,
            notes,
        }
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CriteriaError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("sign mode is not supported by this check")]
    UnsupportedSignMode,
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

impl From<EvalError> for CriteriaError {
    fn from(e: EvalError) -> Self {
        CriteriaError::Series(SeriesError::Eval(e))
    }
}

/// Bounds `c1 n ln n < p_n < c2 n ln n` on the n-th prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuaConstants {
    pub c1: Q,
    pub c2: Q,
}

impl HuaConstants {
    pub fn new(c1: BigRational, c2: BigRational) -> Result<HuaConstants, CriteriaError> {
        if c1 <= BigRational::from_integer(0.into()) || c1 >= c2 {
            return Err(CriteriaError::InvalidParam("need 0 < c1 < c2".into()));
        }
        Ok(HuaConstants { c1: Q(c1), c2: Q(c2) })
    }
}

impl Default for HuaConstants {
    fn default() -> Self {
        HuaConstants {
            c1: Q(BigRational::new(1.into(), 2.into())),
            c2: Q(BigRational::from_integer(2.into())),
        }
    }
}

/// `f(b)`: a sequence expression in the argument `b` (and optionally `n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthFn {
    pub f: SequenceExpr,
    pub description: String,
}

impl GrowthFn {
    pub fn parse(text: &str) -> Result<GrowthFn, crate::seqexpr::ParseError> {
        Ok(GrowthFn {
            f: text.parse()?,
            description: format!("f(b) = {text}"),
        })
    }

    pub fn at(&self, n: u64, b: &BigUint, cfg: &EvalConfig) -> Result<BigUint, EvalError> {
        self.f.eval_with_arg(n, b, cfg)
    }
}

/// Default bound a weighted ratio must fall below at the end of the prefix.
pub const DEFAULT_THRESHOLD: &str = "1/10";
/// Default number of final prefix values that must strictly decrease.
pub const DEFAULT_WINDOW: usize = 5;
/// Default prefix depth.
pub const DEFAULT_PREFIX: u64 = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOptions {
    pub prefix: u64,
    pub threshold: BigRational,
    pub window: usize,
    pub eval: EvalConfig,
    pub hua: HuaConstants,
    pub envelope: Option<Envelope>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            prefix: DEFAULT_PREFIX,
            threshold: parse_rational(DEFAULT_THRESHOLD).unwrap(),
            window: DEFAULT_WINDOW,
            eval: EvalConfig::default(),
            hua: HuaConstants::default(),
            envelope: None,
        }
    }
}

impl CheckOptions {
    pub fn with_prefix(prefix: u64) -> CheckOptions {
        CheckOptions {
            prefix,
            ..CheckOptions::default()
        }
    }
}

/// Which criterion to run against a spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    /// Conditions (1)-(3), or the positive-term shortcut.
    Irrational,
    SumPair(Box<SeriesSpec>),
    Lcm,
    GeometricPoly(PolyExp),
    Growth(GrowthFn),
    Roth(BigRational),
    Cremer(u32),
}

pub fn run_check(check: &Check, spec: &SeriesSpec, opts: &CheckOptions) -> Result<Certificate, CriteriaError> {
    match check {
        Check::Irrational => classify_irrational(spec, opts),
        Check::SumPair(other) => Ok(check_sum_pair(spec, other, opts)?.0),
        Check::Lcm => check_lcm_criterion(spec, opts),
        Check::GeometricPoly(p) => classify_geometric_poly(p, opts),
        Check::Growth(f) => Ok(check_growth_approx(spec, f, opts)?.0),
        Check::Roth(eps) => check_roth_transcendence(spec, eps, opts),
        Check::Cremer(d) => check_cremer_condition(spec, *d, opts),
    }
}

pub(crate) fn is_budget_error(e: &EvalError) -> bool {
    matches!(
        e,
        EvalError::BitBudgetExceeded { .. } | EvalError::PrimeCeilingExceeded { .. }
    )
}

/// `Some(value)` within budget, `None` when the budget stops evaluation.
pub(crate) fn eval_within(expr: &SequenceExpr, n: u64, cfg: &EvalConfig) -> Result<Option<BigUint>, EvalError> {
    match expr.eval(n, cfg) {
        Ok(v) => Ok(Some(v)),
        Err(e) if is_budget_error(&e) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The last `window` values strictly decrease and the final one is below the threshold.
pub(crate) fn decreasing_below(values: &[IndexedValue], opts: &CheckOptions) -> Result<(), String> {
    if values.len() < opts.window.max(1) {
        return Err(format!(
            "only {} values computed, {} needed",
            values.len(),
            opts.window.max(1)
        ));
    }
    let tail = &values[values.len() - opts.window.max(1)..];
    for w in tail.windows(2) {
        if w[1].value >= w[0].value {
            return Err(format!("not strictly decreasing at n = {}", w[1].n));
        }
    }
    let last = tail.last().unwrap();
    if last.value.0 >= opts.threshold {
        return Err(format!(
            "value {} at n = {} is not below {}",
            crate::rational::describe(&last.value.0),
            last.n,
            crate::rational::describe(&opts.threshold)
        ));
    }
    Ok(())
}
