use serde::{Deserialize, Serialize};

use super::kinematics::step_kinematics;
use super::potential::Path;
use super::{PlanningError, VelocityCommand};
use crate::geometry::{normalize_angle, Point, Pose};
use crate::world::grid::CLEARANCE_CAP;
use crate::world::OccupancyGrid;

/// Half-width of the box checked around every rollout sample.
pub const COLLISION_HALF: f64 = 0.01;
/// Maximum arc length between consecutive rollout samples. Twice the box
/// half-width, so the boxes cover the whole arc.
pub const SAMPLE_SPACING: f64 = 2.0 * COLLISION_HALF;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DwaWeights {
    pub heading: f64,
    pub clearance: f64,
    pub velocity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DwaParams {
    pub v_max: f64,
    pub w_max: f64,
    pub accel_v: f64,
    pub accel_w: f64,
    pub dt: f64,
    pub horizon: f64,
    pub samples_v: usize,
    pub samples_w: usize,
    pub weights: DwaWeights,
}

impl Default for DwaParams {
    fn default() -> Self {
        Self {
            v_max: 0.6,
            w_max: 1.5,
            accel_v: 1.0,
            accel_w: 2.0,
            dt: 0.1,
            horizon: 1.5,
            samples_v: 11,
            samples_w: 21,
            weights: DwaWeights {
                heading: 1.0,
                clearance: 0.5,
                velocity: 0.2,
            },
        }
    }
}

impl DwaParams {
    pub fn validate(&self) -> Result<(), PlanningError> {
        let positive = [
            ("v_max", self.v_max),
            ("w_max", self.w_max),
            ("accel_v", self.accel_v),
            ("accel_w", self.accel_w),
            ("dt", self.dt),
            ("horizon", self.horizon),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(PlanningError::InvalidParameter(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.samples_v < 2 || self.samples_w < 2 {
            return Err(PlanningError::InvalidParameter(
                "velocity samples must be at least 2 per axis".into(),
            ));
        }
        let w = self.weights;
        for (name, value) in [
            ("heading", w.heading),
            ("clearance", w.clearance),
            ("velocity", w.velocity),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(PlanningError::InvalidParameter(format!(
                    "weight {name} must be non-negative, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Number of `dt` steps in one rollout.
    pub fn rollout_steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }

    /// Reachable velocities after one `dt`. Linear velocity never goes
    /// negative.
    pub fn window(&self, current: VelocityCommand) -> DynamicWindow {
        let dv = self.accel_v * self.dt;
        let dw = self.accel_w * self.dt;
        let v_lo = (current.v - dv).max(0.0);
        let v_hi = (current.v + dv).min(self.v_max).max(v_lo);
        let w_lo = (current.w - dw).max(-self.w_max);
        let w_hi = (current.w + dw).min(self.w_max).max(w_lo);
        DynamicWindow { v_lo, v_hi, w_lo, w_hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicWindow {
    pub v_lo: f64,
    pub v_hi: f64,
    pub w_lo: f64,
    pub w_hi: f64,
}

impl DynamicWindow {
    pub fn contains(&self, cmd: VelocityCommand) -> bool {
        (self.v_lo..=self.v_hi).contains(&cmd.v) && (self.w_lo..=self.w_hi).contains(&cmd.w)
    }

    fn sample(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }
}

/// Every sample of a rollout: the start pose, intermediate points at most
/// [`SAMPLE_SPACING`] apart along the arc, and the pose after each `dt`.
pub fn rollout_samples(pose: Pose, cmd: VelocityCommand, params: &DwaParams) -> Vec<Pose> {
    let per_step = ((cmd.v.abs() * params.dt / SAMPLE_SPACING).ceil() as usize).max(1);
    let steps = params.rollout_steps();
    let mut out = Vec::with_capacity(steps * per_step + 1);
    out.push(pose);
    let mut base = pose;
    for _ in 0..steps {
        for i in 1..per_step {
            out.push(step_kinematics(base, cmd, params.dt * i as f64 / per_step as f64));
        }
        base = step_kinematics(base, cmd, params.dt);
        out.push(base);
    }
    out
}

/// True when any rollout sample box touches an occupied cell.
pub fn rollout_collides(grid: &OccupancyGrid, samples: &[Pose]) -> bool {
    samples
        .iter()
        .any(|p| grid.box_touches_occupied(p.point(), COLLISION_HALF))
}

/// First waypoint at least `lookahead` meters of path ahead of the
/// waypoint closest to the robot; the last waypoint if none is.
pub fn select_carrot(path: &Path, pose: Pose, lookahead: f64) -> Option<Point> {
    let here = pose.point();
    let closest = path
        .waypoints
        .iter()
        .enumerate()
        .min_by(|a, b| here.distance(a.1).total_cmp(&here.distance(b.1)))?
        .0;
    let mut travelled = 0.0;
    for w in closest..path.waypoints.len() - 1 {
        travelled += path.waypoints[w].distance(&path.waypoints[w + 1]);
        if travelled >= lookahead {
            return Some(path.waypoints[w + 1]);
        }
    }
    path.waypoints.last().copied()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwaOutcome {
    pub cmd: VelocityCommand,
    pub recovery: bool,
    pub score: f64,
}

fn bearing_error(pose: Pose, target: Point) -> f64 {
    normalize_angle((target.y - pose.y).atan2(target.x - pose.x) - pose.theta)
}

/// Scores every collision-free sample in the dynamic window toward
/// `carrot` and returns the best, first in sample order on ties. When all
/// rollouts collide, turns in place toward the carrot with `v = 0`.
///
/// Clearance saturates at the carrot's own clearance as well as at
/// [`CLEARANCE_CAP`]; otherwise a carrot close to a wall scores worse than
/// standing still and the robot stalls short of it.
pub fn dwa_command(
    pose: Pose,
    current: VelocityCommand,
    carrot: Point,
    grid: &OccupancyGrid,
    params: &DwaParams,
) -> DwaOutcome {
    let window = params.window(current);
    let weights = params.weights;
    let cap = CLEARANCE_CAP.min(grid.clearance_at(carrot));
    let mut best: Option<(VelocityCommand, f64)> = None;
    for i in 0..params.samples_v {
        let v = DynamicWindow::sample(window.v_lo, window.v_hi, params.samples_v, i);
        for j in 0..params.samples_w {
            let w = DynamicWindow::sample(window.w_lo, window.w_hi, params.samples_w, j);
            let cmd = VelocityCommand { v, w };
            let samples = rollout_samples(pose, cmd, params);
            if rollout_collides(grid, &samples) {
                continue;
            }
            let end = *samples.last().expect("rollouts are non-empty");
            let heading = 1.0 - bearing_error(end, carrot).abs() / std::f64::consts::PI;
            let clearance = samples.iter().map(|p| grid.clearance_at(p.point())).fold(cap, f64::min);
            let velocity = v / params.v_max;
            let score = weights.heading * heading + weights.clearance * clearance + weights.velocity * velocity;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((cmd, score));
            }
        }
    }
    match best {
        Some((cmd, score)) => DwaOutcome {
            cmd,
            recovery: false,
            score,
        },
        None => {
            let turn = if bearing_error(pose, carrot) >= 0.0 {
                window.w_hi.max(0.0)
            } else {
                window.w_lo.min(0.0)
            };
            DwaOutcome {
                cmd: VelocityCommand { v: 0.0, w: turn },
                recovery: true,
                score: f64::NEG_INFINITY,
            }
        }
    }
}

/// Carrot selection followed by [`dwa_command`].
pub fn dwa_step(
    pose: Pose,
    current: VelocityCommand,
    path: &Path,
    grid: &OccupancyGrid,
    params: &DwaParams,
    lookahead: f64,
) -> Result<DwaOutcome, PlanningError> {
    let carrot = select_carrot(path, pose, lookahead).ok_or(PlanningError::EmptyPath)?;
    Ok(dwa_command(pose, current, carrot, grid, params))
}
