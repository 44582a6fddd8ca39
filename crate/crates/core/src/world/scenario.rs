use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{OccupancyWorld, RoomCategory, WorldError};
use crate::geometry::Pose;
use crate::navctl::NavConfig;
use crate::perception::SensorParams;
use crate::planning::PlannerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalTarget {
    RoomNumber(u32),
    RoomCategory(RoomCategory),
}

/// The user's navigation request: a structured target plus the sentence it
/// came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalCommand {
    pub target: GoalTarget,
    pub raw_text: String,
}

impl GoalCommand {
    pub fn room_number(number: u32) -> Self {
        Self {
            target: GoalTarget::RoomNumber(number),
            raw_text: format!("Go to room {number}."),
        }
    }

    pub fn room_category(category: RoomCategory) -> Self {
        Self {
            target: GoalTarget::RoomCategory(category),
            raw_text: format!("Go to the {}.", category.phrase()),
        }
    }

    /// Short slug used in scenario ids, e.g. `202` or `living_room`.
    pub fn slug(&self) -> String {
        match self.target {
            GoalTarget::RoomNumber(n) => n.to_string(),
            GoalTarget::RoomCategory(c) => c.as_str().to_owned(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GoalRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    room_number: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    room_category: Option<RoomCategory>,
    raw_text: String,
}

impl Serialize for GoalCommand {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (room_number, room_category) = match self.target {
            GoalTarget::RoomNumber(n) => (Some(n), None),
            GoalTarget::RoomCategory(c) => (None, Some(c)),
        };
        GoalRepr {
            room_number,
            room_category,
            raw_text: self.raw_text.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GoalCommand {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = GoalRepr::deserialize(deserializer)?;
        let target = match (repr.room_number, repr.room_category) {
            (Some(0), None) => return Err(serde::de::Error::custom("room_number must be positive")),
            (Some(n), None) => GoalTarget::RoomNumber(n),
            (None, Some(c)) => GoalTarget::RoomCategory(c),
            _ => {
                return Err(serde::de::Error::custom(
                    "goal needs exactly one of `room_number` or `room_category`",
                ))
            }
        };
        Ok(Self {
            target,
            raw_text: repr.raw_text,
        })
    }
}

/// `world` is either inline or a path relative to the scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WorldSource {
    Path(String),
    Inline(Box<OccupancyWorld>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    id: Option<String>,
    world: WorldSource,
    start: Pose,
    goal: GoalCommand,
    max_ticks: u64,
    #[serde(default)]
    sensor: SensorParams,
    #[serde(default)]
    planner: PlannerConfig,
    #[serde(default)]
    executive: NavConfig,
}

/// One navigation trial: world, start pose, goal and all tunables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub world: OccupancyWorld,
    pub start: Pose,
    pub goal: GoalCommand,
    pub max_ticks: u64,
    pub sensor: SensorParams,
    pub planner: PlannerConfig,
    pub executive: NavConfig,
}

impl ScenarioSpec {
    pub fn new(world: OccupancyWorld, start: Pose, goal: GoalCommand, max_ticks: u64) -> Result<Self, WorldError> {
        let spec = Self {
            id: None,
            world,
            start,
            goal,
            max_ticks,
            sensor: SensorParams::default(),
            planner: PlannerConfig::default(),
            executive: NavConfig::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn with_goal(mut self, goal: GoalCommand) -> Self {
        self.goal = goal;
        self
    }

    pub fn id_or<'a>(&'a self, fallback: &'a str) -> &'a str {
        self.id.as_deref().unwrap_or(fallback)
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        if self.max_ticks == 0 {
            return Err(WorldError::Invariant("max_ticks must be positive".into()));
        }
        if !self.start.is_finite() || !self.world.is_free(self.start.point()) {
            return Err(WorldError::Invariant(format!(
                "start pose ({}, {}) is not in free space",
                self.start.x, self.start.y
            )));
        }
        self.sensor
            .validate()
            .map_err(|e| WorldError::Invariant(e.to_string()))?;
        self.planner
            .dwa
            .validate()
            .map_err(|e| WorldError::Invariant(e.to_string()))?;
        Ok(())
    }

    /// Parses a scenario document; relative world references resolve
    /// against `base_dir`.
    pub fn from_json_str(text: &str, origin: &str, base_dir: Option<&Path>) -> Result<Self, WorldError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|err| {
            let field = err.path().to_string();
            let inner = err.into_inner();
            WorldError::Parse {
                path: origin.to_owned(),
                message: format!(
                    "line {} column {} (field `{}`): {}",
                    inner.line(),
                    inner.column(),
                    field,
                    inner
                ),
            }
        })?;
        let world = match file.world {
            WorldSource::Inline(w) => *w,
            WorldSource::Path(rel) => {
                let path = base_dir.map_or_else(|| PathBuf::from(&rel), |d| d.join(&rel));
                let text = read(&path)?;
                let de = &mut serde_json::Deserializer::from_str(&text);
                serde_path_to_error::deserialize(de).map_err(|err| WorldError::Parse {
                    path: path.display().to_string(),
                    message: format!("field `{}`: {}", err.path(), err.inner()),
                })?
            }
        };
        let spec = Self {
            id: file.id,
            world,
            start: file.start,
            goal: file.goal,
            max_ticks: file.max_ticks,
            sensor: file.sensor,
            planner: file.planner,
            executive: file.executive,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario serializes");
        text.push('\n');
        text
    }
}

fn read(path: &Path) -> Result<String, WorldError> {
    fs::read_to_string(path).map_err(|source| WorldError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads and validates a scenario file. When the file carries no `id`, the
/// file stem is used.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioSpec, WorldError> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut spec = ScenarioSpec::from_json_str(&text, &path.display().to_string(), path.parent())?;
    if spec.id.is_none() {
        spec.id = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    Ok(spec)
}

pub fn save_scenario(spec: &ScenarioSpec, path: impl AsRef<Path>) -> Result<(), WorldError> {
    let path = path.as_ref();
    fs::write(path, spec.to_json()).map_err(|source| WorldError::Io {
        path: path.display().to_string(),
        source,
    })
}
