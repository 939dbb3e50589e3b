//! Replays the fuzz corpus through the same properties the fuzz targets
//! assert, so the seeds stay meaningful on a stable toolchain.

use std::fs;
use std::path::PathBuf;

use irrat_core::rational::parse_rational;
use irrat_core::report::Report;
use irrat_core::seqexpr::{EvalConfig, SequenceExpr};
use irrat_core::specfile::parse_spec_file;

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read(e.unwrap().path()).unwrap())
        .collect();
    assert!(!out.is_empty(), "no seeds for {target}");
    out.sort();
    out
}

#[test]
fn parse_expr_seeds() {
    let (mut ok, mut bad) = (0, 0);
    for s in seeds("parse_expr") {
        let text = String::from_utf8(s).unwrap();
        match SequenceExpr::parse(&text) {
            Ok(e) => {
                let shown = e.to_string();
                assert_eq!(SequenceExpr::parse(&shown).unwrap().to_string(), shown, "{text}");
                ok += 1;
            }
            Err(e) => {
                assert!(e.position <= text.chars().count(), "{text}");
                bad += 1;
            }
        }
    }
    assert!(ok >= 5 && bad >= 20, "{ok} ok, {bad} rejected");
}

#[test]
fn eval_expr_seeds() {
    let cfg = EvalConfig {
        bit_budget: 1 << 12,
        ..EvalConfig::default()
    };
    for s in seeds("eval_expr") {
        let (&n, rest) = s.split_first().unwrap();
        let Ok(e) = SequenceExpr::parse(std::str::from_utf8(rest).unwrap()) else {
            continue;
        };
        if let Ok(v) = e.eval(u64::from(n % 32), &cfg) {
            assert!(v.bits() <= cfg.bit_budget);
        }
    }
}

#[test]
fn spec_file_seeds() {
    for s in seeds("spec_file") {
        let text = String::from_utf8(s).unwrap();
        if let Err(e) = parse_spec_file(&text) {
            assert!(e.line >= 1 && e.column >= 1);
            assert!(e.line <= text.lines().count() + 1, "{e}");
        }
    }
}

#[test]
fn report_json_seeds() {
    let mut parsed = 0;
    for s in seeds("report_json") {
        let Ok(r) = Report::from_json(std::str::from_utf8(&s).unwrap()) else {
            continue;
        };
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        r.render_text();
        parsed += 1;
    }
    assert!(parsed >= 3);
}

#[test]
fn rational_seeds() {
    for s in seeds("rational") {
        if let Some(q) = parse_rational(std::str::from_utf8(&s).unwrap()) {
            assert_eq!(parse_rational(&q.to_string()), Some(q));
        }
    }
}
