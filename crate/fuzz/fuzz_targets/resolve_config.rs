#![no_main]

use libfuzzer_sys::fuzz_target;
use relaysec::config::{parse_config_text, ConfigPairs, RunConfig};

// Anything that resolves must survive a print/parse round trip and a
// bounds evaluation without panicking.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(pairs) = parse_config_text(text) else {
        return;
    };
    let Ok(cfg) = RunConfig::resolve(&pairs, &ConfigPairs::new()) else {
        return;
    };
    let printed = cfg.to_config_text();
    let reparsed = parse_config_text(&printed).expect("printed config parses");
    let again = RunConfig::resolve(&reparsed, &ConfigPairs::new()).expect("printed config resolves");
    assert_eq!(again.to_config_text(), printed);
    if let Ok(points) = cfg.sweep_points() {
        for p in points.iter().take(16) {
            let _ = relaysec::feasibility(p);
        }
    }
});
