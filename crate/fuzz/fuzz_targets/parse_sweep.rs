#![no_main]

use libfuzzer_sys::fuzz_target;
use relaysec::config::{parse_sweeps, MAX_SWEEP_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(specs) = parse_sweeps(text) {
        for s in specs {
            assert!(!s.values.is_empty() && s.values.len() <= MAX_SWEEP_POINTS);
            assert!(s.values.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }
});
