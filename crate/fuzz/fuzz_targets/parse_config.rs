//! Fuzzes the JSON experiment-config parser: arbitrary bytes must produce
//! `Ok` or a typed error, never a panic.
#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = aqg::parse_config(text);
    }
});
