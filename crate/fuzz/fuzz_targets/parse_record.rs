//! Fuzzes the NDJSON diagnostics-record reader, the other parser that touches
//! external bytes.
#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(record) = aqg::DiagnosticsRecord::from_json_line(text) {
            // A successful parse must re-serialize without panicking.
            let _ = record.to_json_line();
        }
    }
});
