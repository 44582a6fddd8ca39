//! Global potential-field planning and the DWA local planner.

mod dwa;
mod kinematics;
mod potential;

use serde::{Deserialize, Serialize};

pub use dwa::{
    dwa_command, dwa_step, rollout_collides, rollout_samples, select_carrot, DwaOutcome, DwaParams, DwaWeights,
    DynamicWindow, COLLISION_HALF, SAMPLE_SPACING,
};
pub use kinematics::{step_kinematics, STRAIGHT_EPS};
pub use potential::{extract_path, plan_potential, Path, PotentialField};

use crate::world::Cell;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanningError {
    #[error("goal cell ({}, {}) is occupied", .0.col, .0.row)]
    GoalOccupied(Cell),
    #[error("no path from cell ({}, {})", .0.col, .0.row)]
    NoPath(Cell),
    #[error("path is empty")]
    EmptyPath,
    #[error("invalid planner parameter: {0}")]
    InvalidParameter(String),
}

/// Linear (m/s) and angular (rad/s) velocity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct VelocityCommand {
    pub v: f64,
    pub w: f64,
}

impl VelocityCommand {
    pub const fn new(v: f64, w: f64) -> Self {
        Self { v, w }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub dwa: DwaParams,
    /// Path distance to the carrot waypoint, meters.
    pub carrot_lookahead: f64,
    /// Distance at which the goal point counts as reached, meters.
    pub arrive_tolerance: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            dwa: DwaParams::default(),
            carrot_lookahead: 0.8,
            arrive_tolerance: 0.15,
        }
    }
}
