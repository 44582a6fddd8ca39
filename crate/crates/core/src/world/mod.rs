//! World geometry, rooms and placed objects, plus scenario files and the
//! bundled corridor/house builders.

mod builders;
pub mod grid;
mod scenario;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use builders::{build_corridor, build_house, corridor_goal, CorridorStart};
pub use grid::{rasterize, Cell, OccupancyGrid};
pub use scenario::{load_scenario, save_scenario, GoalCommand, GoalTarget, ScenarioSpec, WorldSource};

use crate::geometry::{point_in_polygon, polygon_is_simple, polygons_overlap, Point, Pose, Segment};

pub const DEFAULT_RESOLUTION: f64 = 0.25;
pub const DEFAULT_ROBOT_RADIUS: f64 = 0.3;

#[derive(Debug, thiserror::Error)]
pub enum WorldError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("out of bounds: {0}")]
    OutOfBounds(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("unknown variant: {0}")]
    UnknownVariant(String),
    #[error("failed to parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoomCategory {
    Kitchen,
    LivingRoom,
    Bedroom,
    HomeGym,
    Corridor,
    Other,
}

impl RoomCategory {
    pub const ALL: [RoomCategory; 6] = [
        RoomCategory::Kitchen,
        RoomCategory::LivingRoom,
        RoomCategory::Bedroom,
        RoomCategory::HomeGym,
        RoomCategory::Corridor,
        RoomCategory::Other,
    ];

    /// snake_case identifier, as used in file names and JSON.
    pub fn as_str(&self) -> &'static str {
        match self {
            RoomCategory::Kitchen => "kitchen",
            RoomCategory::LivingRoom => "living_room",
            RoomCategory::Bedroom => "bedroom",
            RoomCategory::HomeGym => "home_gym",
            RoomCategory::Corridor => "corridor",
            RoomCategory::Other => "other",
        }
    }

    /// Human wording, e.g. "living room".
    pub fn phrase(&self) -> &'static str {
        match self {
            RoomCategory::Kitchen => "kitchen",
            RoomCategory::LivingRoom => "living room",
            RoomCategory::Bedroom => "bedroom",
            RoomCategory::HomeGym => "home gym",
            RoomCategory::Corridor => "corridor",
            RoomCategory::Other => "other area",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for RoomCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    RoomPlate { number: u32 },
    Furniture { category: RoomCategory },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldObject {
    pub id: String,
    pub name: String,
    pub position: Pose,
    pub kind: ObjectKind,
}

impl WorldObject {
    pub fn plate(id: impl Into<String>, number: u32, at: (f64, f64)) -> Self {
        Self {
            id: id.into(),
            name: plate_name(number),
            position: Pose::new(at.0, at.1, 0.0),
            kind: ObjectKind::RoomPlate { number },
        }
    }

    pub fn furniture(id: impl Into<String>, name: impl Into<String>, category: RoomCategory, at: (f64, f64)) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            position: Pose::new(at.0, at.1, 0.0),
            kind: ObjectKind::Furniture { category },
        }
    }

    pub fn point(&self) -> Point {
        self.position.point()
    }
}

/// Display name of a room number plate, e.g. `room_205`.
pub fn plate_name(number: u32) -> String {
    format!("room_{number}")
}

/// Inverse of [`plate_name`].
pub fn plate_number(name: &str) -> Option<u32> {
    let digits = name.strip_prefix("room_")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&n| n > 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomRegion {
    pub name: String,
    pub category: RoomCategory,
    pub polygon: Vec<Point>,
}

impl RoomRegion {
    pub fn rect(name: impl Into<String>, category: RoomCategory, lo: (f64, f64), hi: (f64, f64)) -> Self {
        Self {
            name: name.into(),
            category,
            polygon: vec![
                Point::new(lo.0, lo.1),
                Point::new(hi.0, lo.1),
                Point::new(hi.0, hi.1),
                Point::new(lo.0, hi.1),
            ],
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        point_in_polygon(p, &self.polygon)
    }
}

/// Serialized form of a world; the occupancy grid is derived on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldDef {
    pub width: f64,
    pub height: f64,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default = "default_robot_radius")]
    pub robot_radius: f64,
    #[serde(default)]
    pub walls: Vec<Segment>,
    #[serde(default)]
    pub objects: Vec<WorldObject>,
    #[serde(default)]
    pub regions: Vec<RoomRegion>,
}

fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION
}

fn default_robot_radius() -> f64 {
    DEFAULT_ROBOT_RADIUS
}

/// A validated world: geometry, its rasterized grid, rooms and objects.
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WorldDef", into = "WorldDef")]
pub struct OccupancyWorld {
    def: WorldDef,
    grid: OccupancyGrid,
}

impl OccupancyWorld {
    pub fn new(def: WorldDef) -> Result<Self, WorldError> {
        let grid = rasterize(&def.walls, def.width, def.height, def.resolution, def.robot_radius)?;

        let mut names = BTreeSet::new();
        let mut ids = BTreeSet::new();
        for obj in &def.objects {
            if !names.insert(obj.name.as_str()) {
                return Err(WorldError::Invariant(format!("duplicate object name `{}`", obj.name)));
            }
            if !ids.insert(obj.id.as_str()) {
                return Err(WorldError::Invariant(format!("duplicate object id `{}`", obj.id)));
            }
            if let ObjectKind::RoomPlate { number } = obj.kind {
                if number == 0 {
                    return Err(WorldError::Invariant(format!(
                        "room plate `{}` must carry a positive number",
                        obj.name
                    )));
                }
            }
            if !obj.position.is_finite() {
                return Err(WorldError::Invariant(format!(
                    "object `{}` has a non-finite position",
                    obj.name
                )));
            }
            if grid.occupied_at(obj.point()) {
                return Err(WorldError::Invariant(format!(
                    "object `{}` at ({}, {}) lies in an occupied cell",
                    obj.name, obj.position.x, obj.position.y
                )));
            }
        }

        let in_bounds = |p: &Point| (0.0..=def.width).contains(&p.x) && (0.0..=def.height).contains(&p.y);
        for region in &def.regions {
            if region.polygon.len() < 3 {
                return Err(WorldError::Invariant(format!(
                    "region `{}` needs at least 3 vertices",
                    region.name
                )));
            }
            if !region.polygon.iter().all(in_bounds) {
                return Err(WorldError::Invariant(format!(
                    "region `{}` leaves the world bounds",
                    region.name
                )));
            }
            if !polygon_is_simple(&region.polygon) {
                return Err(WorldError::Invariant(format!(
                    "region `{}` is self-intersecting",
                    region.name
                )));
            }
        }
        for (i, a) in def.regions.iter().enumerate() {
            for b in &def.regions[i + 1..] {
                if polygons_overlap(&a.polygon, &b.polygon) {
                    return Err(WorldError::Invariant(format!(
                        "regions `{}` and `{}` overlap",
                        a.name, b.name
                    )));
                }
            }
        }
        Ok(Self { def, grid })
    }

    pub fn def(&self) -> &WorldDef {
        &self.def
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    pub fn width(&self) -> f64 {
        self.def.width
    }

    pub fn height(&self) -> f64 {
        self.def.height
    }

    pub fn resolution(&self) -> f64 {
        self.def.resolution
    }

    pub fn robot_radius(&self) -> f64 {
        self.def.robot_radius
    }

    pub fn walls(&self) -> &[Segment] {
        &self.def.walls
    }

    pub fn objects(&self) -> &[WorldObject] {
        &self.def.objects
    }

    pub fn regions(&self) -> &[RoomRegion] {
        &self.def.regions
    }

    pub fn object(&self, name: &str) -> Option<&WorldObject> {
        self.def.objects.iter().find(|o| o.name == name)
    }

    pub fn plate(&self, number: u32) -> Option<&WorldObject> {
        self.def
            .objects
            .iter()
            .find(|o| o.kind == ObjectKind::RoomPlate { number })
    }

    pub fn plates(&self) -> impl Iterator<Item = (u32, &WorldObject)> {
        self.def.objects.iter().filter_map(|o| match o.kind {
            ObjectKind::RoomPlate { number } => Some((number, o)),
            ObjectKind::Furniture { .. } => None,
        })
    }

    /// Interior wall count: walls not lying on the outer boundary box of
    /// all walls.
    pub fn interior_walls(&self) -> usize {
        let walls = &self.def.walls;
        if walls.is_empty() {
            return 0;
        }
        let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for w in walls {
            for p in [w.from, w.to] {
                lo_x = lo_x.min(p.x);
                lo_y = lo_y.min(p.y);
                hi_x = hi_x.max(p.x);
                hi_y = hi_y.max(p.y);
            }
        }
        let on_edge = |w: &Segment| {
            (w.from.x == w.to.x && (w.from.x == lo_x || w.from.x == hi_x))
                || (w.from.y == w.to.y && (w.from.y == lo_y || w.from.y == hi_y))
        };
        walls.iter().filter(|w| !on_edge(w)).count()
    }

    pub fn is_free(&self, p: Point) -> bool {
        p.is_finite() && !self.grid.occupied_at(p)
    }

    /// Region containing `p`, if any.
    pub fn region_at(&self, p: Point) -> Option<&RoomRegion> {
        self.def.regions.iter().find(|r| r.contains(p))
    }
}

impl TryFrom<WorldDef> for OccupancyWorld {
    type Error = WorldError;

    fn try_from(def: WorldDef) -> Result<Self, Self::Error> {
        Self::new(def)
    }
}

impl From<OccupancyWorld> for WorldDef {
    fn from(world: OccupancyWorld) -> Self {
        world.def
    }
}
