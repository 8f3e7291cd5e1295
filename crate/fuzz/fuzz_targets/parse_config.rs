#![no_main]

use libfuzzer_sys::fuzz_target;
use relaysec::config::{parse_config_text, KEYS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(pairs) = parse_config_text(text) {
        assert!(pairs.keys().all(|k| KEYS.contains(&k.as_str())));
    }
});
