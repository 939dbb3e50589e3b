use std::time::Instant;

use irrat_core::catalog::list_builtins;
use irrat_core::criteria::{check_growth_approx, combined_spec, run_check, weighted_ratio, Check};
use irrat_core::report::{
    banner_for, compact_fraction, compact_rational, compact_uint, EnclosureReport, Report, TermRow,
};
use irrat_core::series::{certified_decimal, term};
use num_rational::BigRational;
use num_traits::Zero;

use crate::input::SpecArgs;

/// Decimal places rendered by `classify` when `--digits` is absent.
pub const DEFAULT_CLASSIFY_DIGITS: u32 = 20;

fn elapsed_ms(t0: Instant) -> u64 {
    t0.elapsed().as_millis().try_into().unwrap_or(u64::MAX)
}

pub fn run_classify(args: &SpecArgs, digits: Option<u32>) -> Result<Report, String> {
    let t0 = Instant::now();
    let r = args.resolve()?;
    let digits = match digits {
        Some(d) => d,
        None => args.file_digits()?.unwrap_or(DEFAULT_CLASSIFY_DIGITS),
    };
    let (cert, witnesses) = match &r.check {
        Check::Growth(f) => check_growth_approx(&r.spec, f, &r.opts).map_err(|e| e.to_string())?,
        c => (run_check(c, &r.spec, &r.opts).map_err(|e| e.to_string())?, Vec::new()),
    };
    let value_spec = match &r.check {
        Check::SumPair(beta) => combined_spec(&r.spec, beta),
        _ => r.spec.clone(),
    };
    let mut notes = Vec::new();
    if let Some(entry) = &r.entry {
        if !entry.notes.is_empty() {
            notes.push(entry.notes.to_string());
        }
    }
    let enclosure = match certified_decimal(&value_spec, digits, &r.opts.eval) {
        Ok((enc, dec)) => Some(EnclosureReport {
            enclosure: enc,
            digits,
            decimal: Some(dec),
        }),
        Err(e) => {
            notes.push(format!("no {digits}-digit enclosure: {e}"));
            None
        }
    };
    Ok(Report {
        command: "classify".into(),
        input: r.echo,
        banner: banner_for(Some(&cert)),
        certificate: Some(cert),
        enclosure,
        witnesses,
        terms: Vec::new(),
        notes,
        timing_ms: elapsed_ms(t0),
    })
}

pub fn run_eval(args: &SpecArgs, terms: Option<u64>, digits: Option<u32>) -> Result<Report, String> {
    let t0 = Instant::now();
    let r = args.resolve()?;
    let digits = match digits {
        Some(d) => Some(d),
        None => args.file_digits()?,
    };
    if terms.is_none() && digits.is_none() {
        return Err("eval needs --terms N or --digits K".into());
    }
    let cfg = &r.opts.eval;
    let spec = match &r.check {
        Check::SumPair(beta) => combined_spec(&r.spec, beta),
        _ => r.spec.clone(),
    };
    let mut notes = Vec::new();
    let mut rows = Vec::new();
    if let Some(last) = terms {
        if last < spec.start_index {
            return Err(format!("--terms {last} is below the first index {}", spec.start_index));
        }
        let mut sum = BigRational::zero();
        for n in spec.start_index..=last {
            let t = match term(&spec, n, cfg) {
                Ok(t) => t,
                Err(e) => {
                    notes.push(format!("table stops before n = {n}: {e}"));
                    break;
                }
            };
            sum += t.value();
            rows.push(TermRow {
                n,
                a: compact_uint(&t.a),
                b: compact_uint(&t.b),
                c: compact_fraction(&t.a, &t.b, t.negative),
                q: weighted_ratio(&spec, n, cfg).ok().map(|q| compact_rational(&q)),
                partial_sum: compact_rational(&sum),
            });
        }
    }
    let enclosure = match digits {
        Some(k) => match certified_decimal(&spec, k, cfg) {
            Ok((enc, dec)) => Some(EnclosureReport {
                enclosure: enc,
                digits: k,
                decimal: Some(dec),
            }),
            Err(e) => {
                notes.push(format!("no {k}-digit enclosure: {e}"));
                None
            }
        },
        None => None,
    };
    Ok(Report {
        command: "eval".into(),
        input: r.echo,
        certificate: None,
        banner: banner_for(None),
        enclosure,
        witnesses: Vec::new(),
        terms: rows,
        notes,
        timing_ms: elapsed_ms(t0),
    })
}

pub fn run_list(json: bool) -> String {
    let entries = list_builtins();
    if json {
        let items: Vec<_> = entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "name": e.name,
                    "description": e.description,
                    "numer": e.spec.numer.to_string(),
                    "denom": e.spec.denom.to_string(),
                    "start": e.spec.start_index,
                    "params": e.params,
                    "expected": { "verdict": e.expected.0.to_string(), "theorem": e.expected.1.to_string() },
                    "expected_strength": e.expected_strength.to_string(),
                    "notes": e.notes,
                })
            })
            .collect();
        return serde_json::to_string_pretty(&items).expect("list serializes");
    }
    let mut out = String::new();
    for e in &entries {
        out.push_str(&format!(
            "{:<22} {} ({}) [{}]  {}\n",
            e.name, e.expected.0, e.expected.1, e.expected_strength, e.description
        ));
        if !e.params.is_empty() {
            let ps: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("{:<22} defaults: {}\n", "", ps.join(", ")));
        }
        if !e.notes.is_empty() {
            out.push_str(&format!("{:<22} note: {}\n", "", e.notes));
        }
    }
    out
}
