//! Inputs shared by the criterion benches.

use dynacon_core::harness::find_entry;
use dynacon_core::ScenarioSpec;

/// A bundled scenario by id.
pub fn scenario(id: &str) -> ScenarioSpec {
    find_entry(id)
        .unwrap_or_else(|| panic!("no bundled scenario {id}"))
        .load()
        .expect("bundled scenarios load")
}
