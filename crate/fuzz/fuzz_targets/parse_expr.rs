#![no_main]

use irrat_core::seqexpr::SequenceExpr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match SequenceExpr::parse(text) {
        Ok(e) => {
            // printing and reparsing is stable
            let shown = e.to_string();
            let again = SequenceExpr::parse(&shown).expect("printed form reparses");
            assert_eq!(again.to_string(), shown);
        }
        Err(e) => assert!(e.position <= text.chars().count()),
    }
    let _ = irrat_core::criteria::GrowthFn::parse(text);
    let _ = irrat_core::specfile::parse_sign_mode(text);
});
