//! Bundled fixtures must match what the builders produce. Run with
//! `DYNACON_BLESS=1` to rewrite them.

use std::path::PathBuf;

use dynacon_core::harness::{all_entries, ReferenceConfig};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn blessing() -> bool {
    std::env::var_os("DYNACON_BLESS").is_some_and(|v| v == "1")
}

#[test]
fn scenario_fixtures_match_builders() {
    let mut stale = Vec::new();
    for entry in all_entries() {
        let built = entry.build().unwrap().to_json();
        let path = fixture_dir().join("scenarios").join(format!("{}.json", entry.id));
        if blessing() {
            std::fs::write(&path, &built).unwrap();
        } else if entry.json() != built {
            stale.push(entry.id);
        }
    }
    assert!(
        stale.is_empty(),
        "stale fixtures (rerun with DYNACON_BLESS=1): {stale:?}"
    );
}

#[test]
fn bundled_scenarios_round_trip() {
    for entry in all_entries() {
        let loaded = entry.load().unwrap();
        assert_eq!(loaded, entry.build().unwrap(), "{}", entry.id);
    }
}

#[test]
fn reference_config_matches_defaults() {
    let path = fixture_dir().join("reference_config.json");
    let built = serde_json::to_string_pretty(&ReferenceConfig::default()).unwrap() + "\n";
    if blessing() {
        std::fs::write(&path, &built).unwrap();
    }
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: ReferenceConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, ReferenceConfig::default());
}
