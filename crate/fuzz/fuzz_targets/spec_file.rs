#![no_main]

use irrat_core::specfile::parse_spec_file;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Err(e) = parse_spec_file(text) {
        assert!(e.line >= 1 && e.column >= 1);
        assert!(e.line <= text.lines().count() + 1);
    }
});
