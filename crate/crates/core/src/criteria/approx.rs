//! Approximation-based criteria: growth-function witnesses, the Roth-type
//! transcendence condition and the Cremer condition.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Pow, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::conditions::check_divisibility_chain;
use super::{
    decreasing_below, eval_within, is_budget_error, Certificate, CheckOptions, Condition, CriteriaError, GrowthFn,
    Theorem, Verdict,
};
use crate::magnitude::{compare, magnitude_of, ratio_below_half, Certainty, Magnitude, MagnitudeError};
use crate::rational::{biguint_str, half, ratio, Q};
use crate::seqexpr::EvalConfig;
use crate::series::{certify_ratios, partial_sum, SeriesSpec, Strength};

/// `|θ - p/q| < 1/f(q)` with `q = b_n` and `p = b_n S_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproximationWitness {
    pub n: u64,
    #[serde(with = "biguint_str")]
    pub p: BigUint,
    #[serde(with = "biguint_str")]
    pub q: BigUint,
    #[serde(with = "biguint_str")]
    pub f_q: BigUint,
    /// Certified upper bound on `|θ - p/q|`.
    pub gap_bound: Q,
}

fn mag_err(e: MagnitudeError) -> CriteriaError {
    match e {
        MagnitudeError::Eval(e) => e.into(),
        other => CriteriaError::InvalidParam(other.to_string()),
    }
}

fn magnitude_or_none(spec_expr: &crate::seqexpr::SequenceExpr, n: u64, cfg: &EvalConfig) -> Option<Magnitude> {
    magnitude_of(spec_expr, n, cfg).ok()
}

/// `b_n < b_{n+1}` and optionally `b_{n+1} >= 2 b_n`, through magnitudes so
/// that huge denominators still get a proof.
fn check_growth_of_denominators(spec: &SeriesSpec, doubling: bool, opts: &CheckOptions) -> Condition {
    let cfg = &opts.eval;
    let start = spec.start_index;
    let name = if doubling {
        "denominator_doubling"
    } else {
        "strictly_increasing"
    };
    let mut cond = Condition::new(name, start);
    let mut prev = magnitude_or_none(&spec.denom, start, cfg);
    for n in start..opts.prefix.max(start + 1) {
        let next = magnitude_or_none(&spec.denom, n + 1, cfg);
        let (Some(b), Some(b1)) = (&prev, &next) else { break };
        let verdict = if doubling {
            match b.mul(&Magnitude::from_u64(2), cfg) {
                Ok(twice) => match compare(b1, &twice) {
                    Certainty::ProvenAtOrAbove => Certainty::ProvenBelow,
                    Certainty::ProvenBelow => Certainty::ProvenAtOrAbove,
                    Certainty::Unknown => Certainty::Unknown,
                },
                Err(_) => Certainty::Unknown,
            }
        } else {
            compare(b, b1)
        };
        match verdict {
            Certainty::ProvenBelow => cond.to = n + 1,
            Certainty::ProvenAtOrAbove => {
                let what = if doubling { "b(n+1) < 2 b(n)" } else { "b(n+1) <= b(n)" };
                return cond.fail(format!("{what} at n = {n}"));
            }
            Certainty::Unknown => break,
        }
        prev = next;
    }
    if cond.to == start {
        cond.strength = Strength::EvidenceOnly;
        return cond.fail("no pair decided");
    }
    cond.holds = true;
    cond
}

/// Minimum length of the final run of proven indices for an "all large n"
/// condition.
const MIN_TAIL_RUN: usize = 3;

/// Holds when the final run of indices proven below 1/2 has at least
/// `min(window, MIN_TAIL_RUN)` members.
fn eventually_below_half(cond: &mut Condition, decided: &[(u64, bool)], window: usize) {
    let need = window.clamp(1, MIN_TAIL_RUN);
    let run = decided.iter().rev().take_while(|(_, ok)| *ok).count();
    if run < need {
        cond.holds = false;
        cond.detail = match decided.iter().rev().find(|(_, ok)| !ok) {
            Some((n, _)) if run > 0 => format!("only {run} proven indices after the failure at n = {n}"),
            Some((n, _)) => format!("not below 1/2 at n = {n}"),
            None => format!("only {} indices decided", decided.len()),
        };
        return;
    }
    cond.holds = true;
    if let Some((n, _)) = decided.iter().rev().find(|(_, ok)| !ok) {
        cond.detail = format!("holds from n = {} on (fails at n = {n})", n + 1);
    }
}

/// Growth-function approximation: conditions (1)-(4), plus witnesses
/// `p/q = S_n` with `|θ - S_n| < 1/f(b_n)`.
pub fn check_growth_approx(
    spec: &SeriesSpec,
    f: &GrowthFn,
    opts: &CheckOptions,
) -> Result<(Certificate, Vec<ApproximationWitness>), CriteriaError> {
    spec.validate()?;
    if !spec.is_all_positive() {
        return Err(CriteriaError::UnsupportedSignMode);
    }
    let cfg = &opts.eval;
    let start = spec.start_index;
    let mut c2 = Condition::new("growth_ratio", start);
    let mut c3 = Condition::new("growth_tail", start);
    let mut c4 = Condition::new("growth_dominates", start);
    let mut d2 = Vec::new();
    let mut d3 = Vec::new();
    let mut rows = Vec::new();
    for n in start..=opts.prefix.max(start) {
        let vals = (
            eval_within(&spec.denom, n, cfg)?,
            eval_within(&spec.denom, n + 1, cfg)?,
            eval_within(&spec.numer, n + 1, cfg)?,
        );
        let (Some(b), Some(b1), Some(a1)) = vals else { break };
        let (fb, fb1) = match (f.at(n, &b, cfg), f.at(n + 1, &b1, cfg)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) if is_budget_error(&e) => break,
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        };
        let r2 = ratio(&fb, &fb1);
        let r3 = BigRational::new(BigInt::from(&fb * &a1), BigInt::from(b1.clone()));
        let r4 = ratio(&b, &fb);
        d2.push((n, r2 < half()));
        d3.push((n, r3 < half()));
        for (c, v) in [(&mut c2, r2), (&mut c3, r3), (&mut c4, r4)] {
            c.push(n, v);
            c.to = n;
        }
        rows.push((n, b, fb));
    }
    eventually_below_half(&mut c2, &d2, opts.window);
    eventually_below_half(&mut c3, &d3, opts.window);
    match decreasing_below(&c4.values, opts) {
        Ok(()) => c4.holds = true,
        Err(why) => c4 = c4.fail(why),
    }
    let mut notes =
        vec!["ratio condition read as f(b_n)/f(b_{n+1}) < 1/2, the direction the argument uses".to_string()];
    let mut witnesses = Vec::new();
    if c2.holds && c3.holds {
        let last = rows.last().map(|r| r.0).unwrap_or(start);
        for (n, b, fb) in &rows {
            if !d3.iter().any(|(m, ok)| m == n && *ok) {
                continue;
            }
            let Ok(cert) = certify_ratios(spec, n + 1, last + 1, None, cfg) else {
                continue;
            };
            let s = partial_sum(spec, *n, cfg)?;
            let p = (&s * BigRational::from_integer(BigInt::from(b.clone()))).to_integer();
            let gap = crate::series::tail_bound(spec, *n, &cert, cfg)?;
            witnesses.push(ApproximationWitness {
                n: *n,
                p: p.to_biguint().expect("positive partial sum"),
                q: b.clone(),
                f_q: fb.clone(),
                gap_bound: Q(gap),
            });
        }
        if witnesses.is_empty() {
            notes.push("no index had a ratio certificate covering its tail".into());
        }
    }
    let conditions = vec![
        check_divisibility_chain(spec, opts)?,
        check_growth_of_denominators(spec, false, opts),
        c2,
        c3,
        c4,
    ];
    Ok((
        Certificate::assemble(Theorem::T6, Verdict::Irrational, conditions, notes),
        witnesses,
    ))
}

fn reduced_parts(eps: &BigRational) -> Result<(u64, u64), CriteriaError> {
    if !eps.is_positive() {
        return Err(CriteriaError::InvalidParam("epsilon must be positive".into()));
    }
    match (eps.numer().to_u64(), eps.denom().to_u64()) {
        (Some(p), Some(q)) if p <= 1 << 20 && q <= 1 << 20 => Ok((p, q)),
        _ => Err(CriteriaError::InvalidParam(
            "epsilon numerator and denominator must be small".into(),
        )),
    }
}

enum RothStep {
    Exact(BigRational),
    Decided(bool),
    Stop,
}

/// `t_n = a_{n+1} b_n^{2+p/q} / b_{n+1}` compared with 1/2.
fn roth_step(spec: &SeriesSpec, n: u64, p: u64, q: u64, cfg: &EvalConfig) -> Result<RothStep, CriteriaError> {
    let budget = cfg.bit_budget;
    let exact = (
        eval_within(&spec.numer, n + 1, cfg)?,
        eval_within(&spec.denom, n, cfg)?,
        eval_within(&spec.denom, n + 1, cfg)?,
    );
    if let (Some(a1), Some(b), Some(b1)) = &exact {
        let root = if q == 1 { b.clone() } else { b.nth_root(q as u32) };
        let est_bits = b.bits().saturating_mul(2 * q + p) / q + a1.bits();
        if Pow::pow(&root, q) == *b && est_bits <= budget {
            let num = a1 * b * b * Pow::pow(&root, p);
            return Ok(RothStep::Exact(BigRational::new(
                BigInt::from(num),
                BigInt::from(b1.clone()),
            )));
        }
        // (2 a_{n+1})^q b_n^{2q+p} < b_{n+1}^q, all integers
        let lhs_bits = (a1.bits() + 1) * q + b.bits() * (2 * q + p);
        if lhs_bits <= budget && b1.bits() * q <= budget {
            let lhs = Pow::pow(&(a1 * 2u32), q) * Pow::pow(b, 2 * q + p);
            return Ok(RothStep::Decided(lhs < Pow::pow(b1, q)));
        }
    }
    let mags = (
        magnitude_of(&spec.numer, n + 1, cfg),
        magnitude_of(&spec.denom, n, cfg),
        magnitude_of(&spec.denom, n + 1, cfg),
    );
    let (Ok(a1), Ok(b), Ok(b1)) = mags else {
        return Ok(RothStep::Stop);
    };
    let qm = Magnitude::from_u64(q);
    let lhs = a1
        .mul(&Magnitude::from_u64(2), cfg)
        .and_then(|x| x.pow(&qm, cfg))
        .and_then(|x| Ok((x, b.pow(&Magnitude::from_u64(2 * q + p), cfg)?)))
        .and_then(|(x, y)| x.mul(&y, cfg));
    let rhs = b1.pow(&qm, cfg);
    match (lhs, rhs) {
        (Ok(l), Ok(r)) => Ok(match compare(&l, &r) {
            Certainty::ProvenBelow => RothStep::Decided(true),
            Certainty::ProvenAtOrAbove => RothStep::Decided(false),
            Certainty::Unknown => RothStep::Stop,
        }),
        _ => Ok(RothStep::Stop),
    }
}

/// Transcendence through Roth's theorem: `t_n < 1/2` for all large `n`,
/// with `t_n` decreasing on the checked tail.
pub fn check_roth_transcendence(
    spec: &SeriesSpec,
    eps: &BigRational,
    opts: &CheckOptions,
) -> Result<Certificate, CriteriaError> {
    spec.validate()?;
    if !spec.is_all_positive() {
        return Err(CriteriaError::UnsupportedSignMode);
    }
    let (p, q) = reduced_parts(eps)?;
    let start = spec.start_index;
    let mut cond = Condition::new("roth_condition", start);
    let mut decided = Vec::new();
    let mut exact_tail: Vec<(u64, BigRational)> = Vec::new();
    for n in start..=opts.prefix.max(start) {
        match roth_step(spec, n, p, q, &opts.eval)? {
            RothStep::Exact(t) => {
                decided.push((n, t < half()));
                cond.push(n, t.clone());
                exact_tail.push((n, t));
            }
            RothStep::Decided(ok) => decided.push((n, ok)),
            RothStep::Stop => break,
        }
        cond.to = n;
    }
    eventually_below_half(&mut cond, &decided, opts.window);
    if cond.holds {
        let run = decided.iter().rev().take_while(|(_, ok)| *ok).count();
        let first = decided[decided.len() - run].0;
        let tail: Vec<_> = exact_tail.iter().filter(|(n, _)| *n >= first).collect();
        if let Some(w) = tail.windows(2).find(|w| w[1].1 >= w[0].1) {
            cond.holds = false;
            cond.detail = format!("t_n is not decreasing at n = {}", w[1].0);
        }
    }
    let conditions = vec![
        check_divisibility_chain(spec, opts)?,
        check_growth_of_denominators(spec, false, opts),
        cond,
    ];
    let notes = vec![format!(
        "epsilon = {}; Roth's theorem is cited, not verified",
        crate::rational::describe(eps)
    )];
    Ok(Certificate::assemble(
        Theorem::T7,
        Verdict::Transcendental,
        conditions,
        notes,
    ))
}

fn cremer_step(
    spec: &SeriesSpec,
    d: &Magnitude,
    n: u64,
    cfg: &EvalConfig,
) -> Result<(Certainty, Option<BigRational>), CriteriaError> {
    let a1 = magnitude_of(&spec.numer, n + 1, cfg).map_err(mag_err)?;
    let b = magnitude_of(&spec.denom, n, cfg).map_err(mag_err)?;
    let b1 = magnitude_of(&spec.denom, n + 1, cfg).map_err(mag_err)?;
    let e = d
        .pow(&b, cfg)
        .and_then(|x| x.sub(&Magnitude::from_u64(1), cfg))
        .map_err(mag_err)?;
    let num = b.pow(&e, cfg).and_then(|x| x.mul(&a1, cfg)).map_err(mag_err)?;
    let exact = match (num.exact_value(), b1.exact_value()) {
        (Some(x), Some(y)) => Some(ratio(x, y)),
        _ => None,
    };
    Ok((ratio_below_half(&num, &b1, cfg), exact))
}

/// `u_n = a_{n+1} b_n^{d^{b_n} - 1} / b_{n+1} < 1/2`, decided in log space.
pub fn check_cremer_condition(spec: &SeriesSpec, d: u32, opts: &CheckOptions) -> Result<Certificate, CriteriaError> {
    spec.validate()?;
    if d < 2 {
        return Err(CriteriaError::InvalidParam("degree must be at least 2".into()));
    }
    if !spec.is_all_positive() {
        return Err(CriteriaError::UnsupportedSignMode);
    }
    let start = spec.start_index;
    let dm = Magnitude::from_u64(d as u64);
    let mut cond = Condition::new("cremer_condition", start);
    let mut decided = Vec::new();
    let mut stop_reason = None;
    for n in start..=opts.prefix.max(start) {
        match cremer_step(spec, &dm, n, &opts.eval) {
            Ok((Certainty::Unknown, _)) => {
                stop_reason = Some(format!("comparison undecided at n = {n}"));
                break;
            }
            Ok((c, exact)) => {
                decided.push((n, c == Certainty::ProvenBelow));
                if let Some(v) = exact {
                    cond.push(n, v);
                }
                cond.to = n;
            }
            Err(e) => {
                stop_reason = Some(format!("stopped at n = {n}: {e}"));
                break;
            }
        }
    }
    eventually_below_half(&mut cond, &decided, opts.window);
    if cond.holds {
        if let Some(r) = stop_reason {
            cond.detail = if cond.detail.is_empty() {
                r
            } else {
                format!("{}; {r}", cond.detail)
            };
        }
    }
    let conditions = vec![
        check_divisibility_chain(spec, opts)?,
        check_growth_of_denominators(spec, false, opts),
        check_growth_of_denominators(spec, true, opts),
        cond,
    ];
    let notes = vec![format!(
        "d = {d}; membership of the fixed point in the Julia set follows from Cremer's theorem and is not verified numerically"
    )];
    Ok(Certificate::assemble(
        Theorem::T8,
        Verdict::CremerConditionHolds,
        conditions,
        notes,
    ))
}
