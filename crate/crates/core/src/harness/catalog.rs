//! Bundled scenario fixtures and the two experiment suites.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::world::{build_corridor, build_house, CorridorStart, RoomCategory, ScenarioSpec, WorldError};

/// One bundled scenario with the outcome the suites expect of it.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub world: &'static str,
    pub start_tag: Option<&'static str>,
    pub expect_success: bool,
    json: &'static str,
}

macro_rules! entry {
    ($id:literal, $world:literal, $tag:expr, $ok:literal) => {
        CatalogEntry {
            id: $id,
            world: $world,
            start_tag: $tag,
            expect_success: $ok,
            json: include_str!(concat!("../../fixtures/scenarios/", $id, ".json")),
        }
    };
}

pub const PATTERN_SUITE: [CatalogEntry; 8] = [
    entry!("corridor1_t1", "Corridor 1", Some("T1"), true),
    entry!("corridor1_t2", "Corridor 1", Some("T2"), true),
    entry!("corridor1_t3", "Corridor 1", Some("T3"), true),
    entry!("corridor2_t4", "Corridor 2", Some("T4"), true),
    entry!("corridor2_t5", "Corridor 2", Some("T5"), true),
    entry!("corridor2_t6", "Corridor 2", Some("T6"), true),
    entry!("corridor3_t7", "Corridor 3", Some("T7"), true),
    entry!("corridor3_t8", "Corridor 3", Some("T8"), true),
];

pub const CATEGORY_SUITE: [CatalogEntry; 8] = [
    entry!("house1_kitchen", "House 1", None, true),
    entry!("house1_living_room", "House 1", None, true),
    entry!("house1_home_gym", "House 1", None, false),
    entry!("house1_bedroom", "House 1", None, false),
    entry!("house2_kitchen", "House 2", None, true),
    entry!("house2_living_room", "House 2", None, true),
    entry!("house3_kitchen", "House 3", None, true),
    entry!("house3_living_room", "House 3", None, false),
];

impl CatalogEntry {
    pub fn json(&self) -> &'static str {
        self.json
    }

    /// Parses the embedded fixture.
    pub fn load(&self) -> Result<ScenarioSpec, WorldError> {
        let mut spec = ScenarioSpec::from_json_str(self.json, self.id, None)?;
        spec.id.get_or_insert_with(|| self.id.to_owned());
        Ok(spec)
    }

    /// Rebuilds the scenario from the world builders.
    pub fn build(&self) -> Result<ScenarioSpec, WorldError> {
        build_scenario(self.id)
    }
}

pub fn all_entries() -> impl Iterator<Item = &'static CatalogEntry> {
    PATTERN_SUITE.iter().chain(CATEGORY_SUITE.iter())
}

pub fn find_entry(id: &str) -> Option<&'static CatalogEntry> {
    all_entries().find(|e| e.id == id)
}

/// Builds `corridor{v}_t{n}` or `house{v}_{category}` from scratch.
pub fn build_scenario(id: &str) -> Result<ScenarioSpec, WorldError> {
    let unknown = || WorldError::UnknownVariant(format!("scenario id `{id}`"));
    if let Some(rest) = id.strip_prefix("corridor") {
        let (variant, tag) = rest.split_once("_t").ok_or_else(unknown)?;
        let variant: u8 = variant.parse().map_err(|_| unknown())?;
        let start: CorridorStart = tag.parse()?;
        build_corridor(variant, start)
    } else if let Some(rest) = id.strip_prefix("house") {
        let (variant, goal) = rest.split_once('_').ok_or_else(unknown)?;
        let variant: u8 = variant.parse().map_err(|_| unknown())?;
        let goal = RoomCategory::parse(goal).ok_or_else(unknown)?;
        build_house(variant, goal)
    } else {
        Err(unknown())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Pattern,
    Category,
}

impl SuiteName {
    pub fn entries(&self) -> &'static [CatalogEntry; 8] {
        match self {
            SuiteName::Pattern => &PATTERN_SUITE,
            SuiteName::Category => &CATEGORY_SUITE,
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteName::Pattern => "pattern",
            SuiteName::Category => "category",
        })
    }
}

impl FromStr for SuiteName {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pattern" => Ok(SuiteName::Pattern),
            "category" => Ok(SuiteName::Category),
            other => Err(HarnessError::Usage(format!(
                "unknown suite `{other}` (expected `pattern` or `category`)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip_through_builders() {
        for entry in all_entries() {
            let spec = entry.build().unwrap();
            assert_eq!(spec.id.as_deref(), Some(entry.id));
        }
        assert!(build_scenario("corridor4_t1").is_err());
        assert!(build_scenario("house1_garage").is_err());
        assert!(build_scenario("garden").is_err());
    }

    #[test]
    fn suite_names() {
        assert_eq!("pattern".parse::<SuiteName>().unwrap(), SuiteName::Pattern);
        assert!(matches!("bogus".parse::<SuiteName>(), Err(HarnessError::Usage(_))));
    }
}
