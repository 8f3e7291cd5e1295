//! Replays the checked-in fuzz seed corpora on stable so the fuzz target
//! invariants are exercised by `cargo test`.

use std::fs;
use std::path::PathBuf;

use relaysec::config::{
    parse_config_text, parse_sweeps, ConfigPairs, RunConfig, KEYS, MAX_SWEEP_POINTS,
};

fn corpus(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn parse_config_seeds() {
    for text in corpus("parse_config") {
        if let Ok(pairs) = parse_config_text(&text) {
            assert!(pairs.keys().all(|k| KEYS.contains(&k.as_str())));
        }
    }
}

#[test]
fn parse_sweep_seeds() {
    let mut accepted = 0;
    for text in corpus("parse_sweep") {
        if let Ok(specs) = parse_sweeps(&text) {
            accepted += 1;
            for s in specs {
                assert!(!s.values.is_empty() && s.values.len() <= MAX_SWEEP_POINTS);
                assert!(s.values.iter().all(|v| v.is_finite() && *v >= 0.0));
            }
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn resolve_config_seeds_round_trip() {
    let mut resolved = 0;
    for text in corpus("resolve_config") {
        let Ok(pairs) = parse_config_text(&text) else {
            continue;
        };
        let Ok(cfg) = RunConfig::resolve(&pairs, &ConfigPairs::new()) else {
            continue;
        };
        resolved += 1;
        let printed = cfg.to_config_text();
        let again =
            RunConfig::resolve(&parse_config_text(&printed).unwrap(), &ConfigPairs::new()).unwrap();
        assert_eq!(again.to_config_text(), printed);
    }
    assert!(resolved >= 2);
}
