#![no_main]

use irrat_core::seqexpr::{EvalConfig, SequenceExpr};
use libfuzzer_sys::fuzz_target;

// first byte picks n, the rest is the expression
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(e) = SequenceExpr::parse(text) else { return };
    let cfg = EvalConfig {
        bit_budget: 1 << 12,
        ..EvalConfig::default()
    };
    if let Ok(v) = e.eval(u64::from(n % 32), &cfg) {
        assert!(v.bits() <= cfg.bit_budget);
    }
});
