#![no_main]

use irrat_core::report::Report;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = Report::from_json(text) {
        let again = Report::from_json(&r.to_json()).expect("own output parses");
        assert_eq!(again, r);
        let _ = r.render_text();
    }
});
