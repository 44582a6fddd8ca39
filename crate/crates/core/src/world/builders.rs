//! Corridor and house worlds for the pattern and categorical suites.
//!
//! Corridors use plate numbers 201..; plates sit 0.6 m off the wall they
//! belong to so they occupy free cells after inflation. Houses are laid out
//! so the front-door view and the occlusion structure decide which trials
//! can succeed: in House 1 the home gym and bedroom, and in House 3 the
//! living room, are never in line of sight from anywhere the robot is sent.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use super::{
    GoalCommand, OccupancyWorld, RoomCategory, RoomRegion, ScenarioSpec, WorldDef, WorldError, WorldObject,
    DEFAULT_RESOLUTION, DEFAULT_ROBOT_RADIUS,
};
use crate::geometry::{Pose, Segment};

const CORRIDOR_MAX_TICKS: u64 = 1500;
const HOUSE_MAX_TICKS: u64 = 4000;

/// Start positions of the pattern suite: T1-T3 in Corridor 1, T4-T6 in
/// Corridor 2, T7-T8 in Corridor 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CorridorStart {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
}

impl CorridorStart {
    pub const ALL: [CorridorStart; 8] = [
        CorridorStart::T1,
        CorridorStart::T2,
        CorridorStart::T3,
        CorridorStart::T4,
        CorridorStart::T5,
        CorridorStart::T6,
        CorridorStart::T7,
        CorridorStart::T8,
    ];

    pub fn variant(&self) -> u8 {
        match self {
            CorridorStart::T1 | CorridorStart::T2 | CorridorStart::T3 => 1,
            CorridorStart::T4 | CorridorStart::T5 | CorridorStart::T6 => 2,
            CorridorStart::T7 | CorridorStart::T8 => 3,
        }
    }

    pub fn index(&self) -> usize {
        *self as usize + 1
    }
}

impl fmt::Display for CorridorStart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.index())
    }
}

impl FromStr for CorridorStart {
    type Err = WorldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n: usize = s
            .trim()
            .trim_start_matches(['T', 't'])
            .parse()
            .map_err(|_| WorldError::UnknownVariant(format!("start tag `{s}`")))?;
        Self::ALL
            .get(n.wrapping_sub(1))
            .copied()
            .ok_or_else(|| WorldError::UnknownVariant(format!("start tag `{s}`")))
    }
}

/// Goal room of each pattern trial. None of these plates is visible from
/// its start pose.
pub fn corridor_goal(start: CorridorStart) -> u32 {
    match start {
        CorridorStart::T1 => 202,
        CorridorStart::T2 => 206,
        CorridorStart::T3 => 209,
        CorridorStart::T4 => 208,
        CorridorStart::T5 => 210,
        CorridorStart::T6 => 202,
        CorridorStart::T7 => 211,
        CorridorStart::T8 => 203,
    }
}

fn rect_walls(lo: (f64, f64), hi: (f64, f64)) -> Vec<Segment> {
    vec![
        Segment::new(lo, (hi.0, lo.1)),
        Segment::new((hi.0, lo.1), hi),
        Segment::new(hi, (lo.0, hi.1)),
        Segment::new((lo.0, hi.1), lo),
    ]
}

fn world(
    width: f64,
    height: f64,
    walls: Vec<Segment>,
    objects: Vec<WorldObject>,
    regions: Vec<RoomRegion>,
) -> Result<OccupancyWorld, WorldError> {
    OccupancyWorld::new(WorldDef {
        width,
        height,
        resolution: DEFAULT_RESOLUTION,
        robot_radius: DEFAULT_ROBOT_RADIUS,
        walls,
        objects,
        regions,
    })
}

fn plates(entries: impl IntoIterator<Item = (u32, f64, f64)>) -> Vec<WorldObject> {
    entries
        .into_iter()
        .map(|(n, x, y)| WorldObject::plate(format!("plate_{n}"), n, (x, y)))
        .collect()
}

/// Straight hallway, interior x in [1, 18], y in [1, 4].
fn straight_hall(objects: Vec<WorldObject>) -> Result<OccupancyWorld, WorldError> {
    world(
        19.0,
        5.0,
        rect_walls((1.0, 1.0), (18.0, 4.0)),
        objects,
        vec![RoomRegion::rect(
            "hall",
            RoomCategory::Corridor,
            (1.0, 1.0),
            (18.0, 4.0),
        )],
    )
}

fn corridor_world(variant: u8) -> Result<OccupancyWorld, WorldError> {
    match variant {
        // Facing doors: numbers rise along the +y wall and fall along the -y
        // wall, so 201 faces 210 and 205 faces 206.
        1 => {
            let xs = [4.0, 7.0, 10.0, 13.0, 16.0];
            let upper = (0..5).map(|i| (201 + i as u32, xs[i], 3.4));
            let lower = (0..5).map(|i| (210 - i as u32, xs[i], 1.6));
            straight_hall(plates(upper.chain(lower)))
        }
        // Counter-clockwise: 201..205 left to right along -y, then 206..210
        // right to left along +y. Doors are staggered between the walls.
        2 => {
            let lower = [3.0, 6.0, 9.0, 12.0, 15.0]
                .into_iter()
                .enumerate()
                .map(|(i, x)| (201 + i as u32, x, 1.6));
            let upper = [16.5, 13.5, 10.5, 7.5, 4.5]
                .into_iter()
                .enumerate()
                .map(|(i, x)| (206 + i as u32, x, 3.4));
            straight_hall(plates(lower.chain(upper)))
        }
        // L-shape: leg A along y in [1, 4] from x = 1 to 19, leg B along
        // x in [16, 19] from y = 4 to 16. Plates follow the outer wall.
        3 => {
            let walls = vec![
                Segment::new((1.0, 1.0), (19.0, 1.0)),
                Segment::new((19.0, 1.0), (19.0, 16.0)),
                Segment::new((19.0, 16.0), (16.0, 16.0)),
                Segment::new((16.0, 16.0), (16.0, 4.0)),
                Segment::new((16.0, 4.0), (1.0, 4.0)),
                Segment::new((1.0, 4.0), (1.0, 1.0)),
            ];
            let leg_a = (0..7).map(|i| (201 + i as u32, 3.0 + 2.0 * i as f64, 1.6));
            let leg_b = (0..6).map(|i| (208 + i as u32, 18.4, 4.5 + 2.0 * i as f64));
            world(
                20.0,
                17.0,
                walls,
                plates(leg_a.chain(leg_b)),
                vec![
                    RoomRegion::rect("leg_a", RoomCategory::Corridor, (1.0, 1.0), (16.0, 4.0)),
                    RoomRegion {
                        name: "leg_b".into(),
                        category: RoomCategory::Corridor,
                        polygon: vec![
                            (16.0, 1.0).into(),
                            (19.0, 1.0).into(),
                            (19.0, 16.0).into(),
                            (16.0, 16.0).into(),
                        ],
                    },
                ],
            )
        }
        other => Err(WorldError::UnknownVariant(format!("corridor {other}"))),
    }
}

fn corridor_start(start: CorridorStart) -> Pose {
    match start {
        CorridorStart::T1 | CorridorStart::T4 | CorridorStart::T7 => Pose::new(1.6, 2.5, 0.0),
        CorridorStart::T2 | CorridorStart::T5 => Pose::new(9.5, 2.5, 0.0),
        CorridorStart::T3 | CorridorStart::T6 => Pose::new(17.4, 2.5, PI),
        CorridorStart::T8 => Pose::new(17.5, 2.5, FRAC_PI_2),
    }
}

/// Pattern-suite scenario `corridor{variant}_t{n}`.
pub fn build_corridor(variant: u8, start: CorridorStart) -> Result<ScenarioSpec, WorldError> {
    let world = corridor_world(variant)?;
    if start.variant() != variant {
        return Err(WorldError::UnknownVariant(format!(
            "start {start} does not belong to corridor {variant}"
        )));
    }
    let id = format!("corridor{variant}_t{}", start.index());
    Ok(ScenarioSpec::new(
        world,
        corridor_start(start),
        GoalCommand::room_number(corridor_goal(start)),
        CORRIDOR_MAX_TICKS,
    )?
    .with_id(id))
}

fn furniture(entries: &[(&str, RoomCategory, f64, f64)]) -> Vec<WorldObject> {
    entries
        .iter()
        .enumerate()
        .map(|(i, &(name, cat, x, y))| WorldObject::furniture(format!("obj_{i:02}"), name, cat, (x, y)))
        .collect()
}

fn house_world(variant: u8) -> Result<OccupancyWorld, WorldError> {
    use RoomCategory::*;
    match variant {
        // South half: open kitchen (west) and living room (east) with an
        // entry strip between them. North half: home gym and bedroom behind
        // a partition whose only opening is in the far north-east corner.
        1 => {
            let mut walls = rect_walls((0.5, 0.5), (15.5, 11.5));
            walls.push(Segment::new((0.5, 6.0), (14.0, 6.0)));
            walls.push(Segment::new((8.0, 6.0), (8.0, 10.0)));
            let objects = furniture(&[
                ("refrigerator", Kitchen, 4.0, 3.5),
                ("sink", Kitchen, 5.0, 4.6),
                ("cooking_bench", Kitchen, 6.2, 5.0),
                ("table", Kitchen, 5.5, 2.5),
                ("chair", Kitchen, 6.5, 2.0),
                ("sofa", LivingRoom, 11.0, 3.0),
                ("tv_cabinet", LivingRoom, 11.5, 4.4),
                ("television", LivingRoom, 12.0, 3.9),
                ("treadmill", HomeGym, 2.0, 9.5),
                ("dumbbell", HomeGym, 4.0, 10.5),
                ("exercise_bike", HomeGym, 5.5, 8.0),
                ("yoga_mat", HomeGym, 2.5, 7.3),
                ("bed", Bedroom, 12.5, 9.5),
                ("wardrobe", Bedroom, 9.5, 10.8),
                ("nightstand", Bedroom, 14.2, 10.5),
                ("dresser", Bedroom, 10.0, 7.0),
            ]);
            let regions = vec![
                RoomRegion::rect("kitchen", Kitchen, (0.5, 0.5), (7.5, 6.0)),
                RoomRegion::rect("entry", Corridor, (7.5, 0.5), (8.5, 6.0)),
                RoomRegion::rect("living_room", LivingRoom, (8.5, 0.5), (15.5, 6.0)),
                RoomRegion::rect("home_gym", HomeGym, (0.5, 6.0), (8.0, 11.5)),
                RoomRegion::rect("bedroom", Bedroom, (8.0, 6.0), (15.5, 11.5)),
            ];
            world(16.0, 12.0, walls, objects, regions)
        }
        // One open space, no partitions.
        2 => {
            let walls = rect_walls((0.5, 0.5), (15.5, 9.5));
            let objects = furniture(&[
                ("stove", Kitchen, 5.2, 4.8),
                ("refrigerator", Kitchen, 2.0, 8.5),
                ("sink", Kitchen, 3.5, 8.6),
                ("sofa", LivingRoom, 11.0, 4.6),
                ("television", LivingRoom, 14.0, 8.2),
                ("coffee_table", LivingRoom, 12.5, 6.0),
                ("bed", Bedroom, 2.0, 2.0),
                ("wardrobe", Bedroom, 1.3, 3.0),
                ("treadmill", HomeGym, 13.3, 2.0),
                ("dumbbell", HomeGym, 14.5, 1.5),
            ]);
            let regions = vec![
                RoomRegion::rect("kitchen", Kitchen, (0.5, 4.0), (6.0, 9.5)),
                RoomRegion::rect("living_room", LivingRoom, (10.0, 4.0), (15.5, 9.5)),
                RoomRegion::rect("bedroom", Bedroom, (0.5, 0.5), (5.0, 3.5)),
                RoomRegion::rect("home_gym", HomeGym, (11.0, 0.5), (15.5, 3.5)),
            ];
            world(16.0, 10.0, walls, objects, regions)
        }
        // The front door opens into a bedroom/study (south-west); the
        // kitchen is through a door in its east wall; the living room spans
        // the north half and opens only at the far north-east.
        3 => {
            let mut walls = rect_walls((0.5, 0.5), (15.5, 11.5));
            walls.push(Segment::new((6.0, 0.5), (6.0, 1.0)));
            walls.push(Segment::new((6.0, 3.0), (6.0, 6.0)));
            walls.push(Segment::new((0.5, 6.0), (14.0, 6.0)));
            let objects = furniture(&[
                ("painting", Other, 2.0, 1.2),
                ("wardrobe", Bedroom, 1.4, 5.2),
                ("bed", Bedroom, 3.2, 4.4),
                ("shelf", Other, 4.2, 5.2),
                ("desk", Bedroom, 4.8, 1.6),
                ("refrigerator", Kitchen, 8.5, 2.0),
                ("sink", Kitchen, 11.0, 4.8),
                ("stove", Kitchen, 13.5, 2.0),
                ("sofa", LivingRoom, 3.0, 9.0),
                ("television", LivingRoom, 2.0, 10.6),
                ("tv_cabinet", LivingRoom, 4.5, 10.6),
                ("armchair", LivingRoom, 6.0, 8.0),
            ]);
            let regions = vec![
                RoomRegion::rect("bedroom", Bedroom, (0.5, 0.5), (6.0, 6.0)),
                RoomRegion::rect("kitchen", Kitchen, (6.0, 0.5), (15.5, 6.0)),
                RoomRegion::rect("living_room", LivingRoom, (0.5, 6.0), (15.5, 11.5)),
            ];
            world(16.0, 12.0, walls, objects, regions)
        }
        other => Err(WorldError::UnknownVariant(format!("house {other}"))),
    }
}

fn house_start(variant: u8) -> Pose {
    match variant {
        3 => Pose::new(1.2, 3.0, 0.0),
        _ => Pose::new(8.0, 1.3, FRAC_PI_2),
    }
}

/// Categorical-suite scenario `house{variant}_{goal}`. Every trial starts at
/// the front door.
pub fn build_house(variant: u8, goal: RoomCategory) -> Result<ScenarioSpec, WorldError> {
    let world = house_world(variant)?;
    let id = format!("house{variant}_{}", goal.as_str());
    Ok(ScenarioSpec::new(
        world,
        house_start(variant),
        GoalCommand::room_category(goal),
        HOUSE_MAX_TICKS,
    )?
    .with_id(id))
}
