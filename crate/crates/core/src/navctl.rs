//! The navigation executive: sense, reason, resolve a goal point, plan and
//! drive, one tick at a time.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{Point, Pose};
use crate::perception::{ObjectList, ObjectServer, PerceptionError};
use crate::planning::{
    dwa_command, extract_path, plan_potential, rollout_collides, rollout_samples, select_carrot, Path, PlanningError,
    PotentialField, VelocityCommand,
};
use crate::reasoning::{BackendConfig, CategoryMap, Reasoner, ReasoningError, ReasoningVerdict};
use crate::world::{Cell, GoalTarget, OccupancyGrid, ScenarioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NavConfig {
    /// Goal points stop this far short of the desired object, meters.
    pub standoff: f64,
    /// Room-number goals succeed within this distance of the plate.
    pub success_radius: f64,
    /// Detected objects this close to the robot count as visited.
    pub visited_radius: f64,
    /// Consecutive ticks without a goal point or pending query before the
    /// trial fails.
    pub idle_limit: u64,
}

impl Default for NavConfig {
    fn default() -> Self {
        Self {
            standoff: 0.5,
            success_radius: 1.0,
            visited_radius: 0.7,
            idle_limit: 100,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum NavError {
    #[error(transparent)]
    Reasoning(#[from] ReasoningError),
    #[error(transparent)]
    Perception(#[from] PerceptionError),
    #[error(transparent)]
    Planning(#[from] PlanningError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    Timeout,
    Idle,
    Backend,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::Timeout => "timeout",
            FailureReason::Idle => "idle",
            FailureReason::Backend => "backend",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "reason")]
pub enum TrialStatus {
    Running,
    Success,
    Failure(FailureReason),
}

impl TrialStatus {
    pub fn is_success(&self) -> bool {
        matches!(self, TrialStatus::Success)
    }

    pub fn is_terminal(&self) -> bool {
        !matches!(self, TrialStatus::Running)
    }
}

impl fmt::Display for TrialStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrialStatus::Running => f.write_str("running"),
            TrialStatus::Success => f.write_str("success"),
            TrialStatus::Failure(r) => write!(f, "failure({r})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecMode {
    /// First verdict not yet delivered.
    Pending,
    /// Driving to the desired object.
    Directed,
    /// Verdict was None; exploring the nearest unvisited object.
    Fallback,
    /// No goal point and nothing outstanding.
    Idle,
}

/// One trace line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub tick: u64,
    pub pose: Pose,
    pub cmd: VelocityCommand,
    pub list_hash: String,
    pub verdict: Option<String>,
    pub goal_point: Option<Point>,
    pub mode: ExecMode,
    pub queried: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delivered: Option<String>,
}

#[derive(Debug)]
struct PendingQuery {
    due: u64,
    result: Result<ReasoningVerdict, ReasoningError>,
}

#[derive(Debug, Clone)]
struct Plan {
    target: String,
    goal_cell: Cell,
    field: PotentialField,
}

/// Mutable state of one trial.
#[derive(Debug, Clone)]
pub struct ExecState {
    pub tick: u64,
    pub pose: Pose,
    pub vel: VelocityCommand,
    pub current_list: ObjectList,
    pub verdict: Option<ReasoningVerdict>,
    pub target: Option<String>,
    pub goal_point: Option<Point>,
    pub visited: BTreeSet<String>,
    pub idle_ticks: u64,
}

/// Goal point for `verdict`: the object's snapshot position pulled
/// `standoff` toward the robot and moved to the nearest free cell. A None
/// verdict falls back to the nearest detected object not yet visited.
pub fn resolve_goal(
    verdict: &ReasoningVerdict,
    list: &ObjectList,
    pose: Pose,
    visited: &BTreeSet<String>,
    grid: &OccupancyGrid,
    standoff: f64,
) -> Option<(String, Point)> {
    let here = pose.point();
    let name = match &verdict.desired_object {
        Some(name) => name.clone(),
        None => list
            .entries
            .iter()
            .filter(|(n, _)| !visited.contains(*n))
            .min_by(|a, b| here.distance(a.1).total_cmp(&here.distance(b.1)))?
            .0
            .clone(),
    };
    let object = list.position(&name)?;
    Some((name, standoff_point(object, here, standoff, grid)))
}

fn standoff_point(object: Point, robot: Point, standoff: f64, grid: &OccupancyGrid) -> Point {
    let d = object.distance(&robot);
    let p = if d <= standoff {
        robot
    } else {
        let k = standoff / d;
        Point::new(object.x + (robot.x - object.x) * k, object.y + (robot.y - object.y) * k)
    };
    if grid.occupied_at(p) {
        nearest_free_center(grid, p).unwrap_or(p)
    } else {
        p
    }
}

fn nearest_free_center(grid: &OccupancyGrid, p: Point) -> Option<Point> {
    let origin = grid.cell_of(p);
    let max_r = grid.cols().max(grid.rows()) as i64;
    let mut best: Option<(f64, Point)> = None;
    for r in 1..=max_r {
        for dr in -r..=r {
            for dc in -r..=r {
                if dr.abs() != r && dc.abs() != r {
                    continue;
                }
                let cell = Cell::new(origin.col + dc, origin.row + dr);
                if grid.is_free(cell) {
                    let c = grid.center(cell);
                    let d = c.distance(&p);
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, c));
                    }
                }
            }
        }
        // Any cell in a later ring is at least r * resolution away.
        if let Some((d, c)) = best {
            if d <= r as f64 * grid.resolution() {
                return Some(c);
            }
        }
    }
    best.map(|(_, c)| c)
}

/// Success, failure or running for the state after a tick.
pub fn check_termination(state: &ExecState, scenario: &ScenarioSpec, backend_failed: bool) -> TrialStatus {
    if backend_failed {
        return TrialStatus::Failure(FailureReason::Backend);
    }
    let here = state.pose.point();
    let reached = match scenario.goal.target {
        GoalTarget::RoomNumber(n) => scenario
            .world
            .plate(n)
            .is_some_and(|plate| plate.point().distance(&here) <= scenario.executive.success_radius),
        GoalTarget::RoomCategory(c) => scenario
            .world
            .regions()
            .iter()
            .any(|r| r.category == c && r.contains(here)),
    };
    if reached {
        TrialStatus::Success
    } else if state.idle_ticks >= scenario.executive.idle_limit {
        TrialStatus::Failure(FailureReason::Idle)
    } else if state.tick >= scenario.max_ticks {
        TrialStatus::Failure(FailureReason::Timeout)
    } else {
        TrialStatus::Running
    }
}

/// Drives one trial.
pub struct Executive<'a> {
    scenario: &'a ScenarioSpec,
    reasoner: Reasoner,
    server: ObjectServer,
    state: ExecState,
    pending: Option<PendingQuery>,
    requery: bool,
    plan: Option<Plan>,
    status: TrialStatus,
    verdicts: Vec<ReasoningVerdict>,
    lists: Vec<ObjectList>,
    backend_error: Option<ReasoningError>,
}

impl<'a> Executive<'a> {
    pub fn new(scenario: &'a ScenarioSpec, backend: BackendConfig, map: CategoryMap) -> Result<Self, NavError> {
        let reasoner = Reasoner::new(&scenario.goal, backend, map)?;
        Ok(Self {
            scenario,
            reasoner,
            server: ObjectServer::new(scenario.sensor),
            state: ExecState {
                tick: 0,
                pose: scenario.start,
                vel: VelocityCommand::default(),
                current_list: ObjectList::new(0),
                verdict: None,
                target: None,
                goal_point: None,
                visited: BTreeSet::new(),
                idle_ticks: 0,
            },
            pending: None,
            requery: false,
            plan: None,
            status: TrialStatus::Running,
            verdicts: Vec::new(),
            lists: Vec::new(),
            backend_error: None,
        })
    }

    pub fn state(&self) -> &ExecState {
        &self.state
    }

    pub fn status(&self) -> TrialStatus {
        self.status
    }

    pub fn verdicts(&self) -> &[ReasoningVerdict] {
        &self.verdicts
    }

    pub fn lists(&self) -> &[ObjectList] {
        &self.lists
    }

    pub fn queries(&self) -> u64 {
        self.reasoner.queries()
    }

    pub fn backend_error(&self) -> Option<&ReasoningError> {
        self.backend_error.as_ref()
    }

    fn issue_query(&mut self) {
        let tick = self.state.tick;
        let incumbent = self.state.verdict.as_ref().and_then(|v| v.desired_object.clone());
        let result = self
            .reasoner
            .reason(&self.state.current_list, incumbent.as_deref(), tick);
        self.pending = Some(PendingQuery {
            due: tick + self.reasoner.config().latency_ticks,
            result,
        });
        self.requery = false;
    }

    fn mode(&self) -> ExecMode {
        match (&self.state.verdict, self.state.goal_point) {
            (None, _) if self.pending.is_some() => ExecMode::Pending,
            (Some(v), Some(_)) if v.desired_object.is_some() => ExecMode::Directed,
            (Some(v), Some(_)) if v.desired_object.is_none() => ExecMode::Fallback,
            _ => ExecMode::Idle,
        }
    }

    fn set_goal(&mut self, resolved: Option<(String, Point)>) -> Result<(), NavError> {
        let grid = self.scenario.world.grid();
        let Some((target, point)) = resolved else {
            self.state.target = None;
            self.state.goal_point = None;
            self.plan = None;
            return Ok(());
        };
        let goal_cell = grid.cell_of(point);
        let replan = match &self.plan {
            Some(plan) => plan.target != target || plan.goal_cell.chebyshev(&goal_cell) > 1,
            None => true,
        };
        if replan {
            let field = plan_potential(grid, goal_cell);
            let reachable = field
                .as_ref()
                .is_ok_and(|f| f.is_reachable(grid.cell_of(self.state.pose.point())));
            if !reachable {
                // Nothing to drive to; treat the object as explored.
                self.state.visited.insert(target);
                self.state.target = None;
                self.state.goal_point = None;
                self.plan = None;
                return Ok(());
            }
            self.plan = Some(Plan {
                target: target.clone(),
                goal_cell,
                field: field?,
            });
        }
        self.state.target = Some(target);
        self.state.goal_point = Some(point);
        Ok(())
    }

    fn current_path(&self) -> Result<Option<Path>, NavError> {
        let (Some(plan), Some(goal)) = (&self.plan, self.state.goal_point) else {
            return Ok(None);
        };
        let grid = self.scenario.world.grid();
        let mut path = extract_path(&plan.field, grid.cell_of(self.state.pose.point()))?;
        if path.goal() != Some(goal) {
            path.waypoints.push(goal);
        }
        Ok(Some(path))
    }

    fn brake(&self) -> VelocityCommand {
        let dwa = &self.scenario.planner.dwa;
        let toward_zero = |x: f64, step: f64| x.signum() * (x.abs() - step).max(0.0);
        let mut cmd = VelocityCommand::new(
            toward_zero(self.state.vel.v, dwa.accel_v * dwa.dt),
            toward_zero(self.state.vel.w, dwa.accel_w * dwa.dt),
        );
        let one_step = crate::planning::DwaParams {
            horizon: dwa.dt,
            ..*dwa
        };
        if rollout_collides(
            self.scenario.world.grid(),
            &rollout_samples(self.state.pose, cmd, &one_step),
        ) {
            cmd.v = 0.0;
        }
        cmd
    }

    /// Advances one tick. Returns the trace record for it.
    pub fn tick(&mut self) -> Result<TraceRecord, NavError> {
        assert!(!self.status.is_terminal(), "tick after termination");
        let scenario = self.scenario;
        let world = &scenario.world;
        let tick = self.state.tick;
        let mut published = None;
        let mut queried = false;
        let mut delivered = None;

        // (1) sense and gate reasoning on list changes
        if self.server.is_sample_tick(tick) {
            let changed = self.server.update(world, self.state.pose, tick)?;
            let current = self.server.current().expect("sampled").clone();
            if changed {
                published = Some(current.names().map(str::to_owned).collect());
                self.lists.push(current.clone());
                self.state.current_list = current;
                if self.pending.is_some() {
                    self.requery = true;
                } else {
                    self.issue_query();
                    queried = true;
                }
            } else {
                self.state.current_list = current;
            }
        }

        // (2) deliver a verdict that has come due
        let mut new_verdict = false;
        if self.pending.as_ref().is_some_and(|p| p.due <= tick) {
            let pending = self.pending.take().expect("checked");
            match pending.result {
                Ok(verdict) => {
                    delivered = Some(verdict.label().to_owned());
                    self.verdicts.push(verdict.clone());
                    self.state.verdict = Some(verdict);
                    new_verdict = true;
                }
                Err(err) => {
                    self.backend_error = Some(err);
                    self.status = TrialStatus::Failure(FailureReason::Backend);
                    return Ok(self.record(VelocityCommand::default(), published, queried, delivered));
                }
            }
            if self.requery {
                self.issue_query();
                queried = true;
            }
        }

        // (3) resolve the goal point
        if let Some(verdict) = self.state.verdict.clone() {
            let refresh = match &verdict.desired_object {
                _ if new_verdict => true,
                Some(_) => false,
                None => match &self.state.target {
                    None => published.is_some(),
                    Some(t) => self.state.visited.contains(t) || !self.state.current_list.contains(t),
                },
            };
            if refresh {
                let resolved = resolve_goal(
                    &verdict,
                    &self.state.current_list,
                    self.state.pose,
                    &self.state.visited,
                    world.grid(),
                    scenario.executive.standoff,
                );
                self.set_goal(resolved)?;
            }
        }

        // (4) act
        let arrived = self
            .state
            .goal_point
            .is_some_and(|g| g.distance(&self.state.pose.point()) <= scenario.planner.arrive_tolerance);
        let cmd = match self.current_path()? {
            Some(path) if !arrived => {
                let carrot = select_carrot(&path, self.state.pose, scenario.planner.carrot_lookahead)
                    .ok_or(PlanningError::EmptyPath)?;
                dwa_command(
                    self.state.pose,
                    self.state.vel,
                    carrot,
                    world.grid(),
                    &scenario.planner.dwa,
                )
                .cmd
            }
            _ => self.brake(),
        };
        self.state.pose = crate::planning::step_kinematics(self.state.pose, cmd, scenario.planner.dwa.dt);
        self.state.vel = cmd;

        // (5) bookkeeping
        let here = self.state.pose.point();
        let radius = scenario.executive.visited_radius;
        for (name, p) in &self.state.current_list.entries {
            if p.distance(&here) <= radius {
                self.state.visited.insert(name.clone());
            }
        }
        let fallback = self.state.verdict.as_ref().is_some_and(|v| v.desired_object.is_none());
        if arrived && fallback {
            if let Some(t) = &self.state.target {
                self.state.visited.insert(t.clone());
            }
        }
        if self.state.goal_point.is_none() && self.pending.is_none() {
            self.state.idle_ticks += 1;
        } else {
            self.state.idle_ticks = 0;
        }

        let record = self.record(cmd, published, queried, delivered);
        self.state.tick += 1;
        self.status = check_termination(&self.state, scenario, false);
        Ok(record)
    }

    fn record(
        &self,
        cmd: VelocityCommand,
        list: Option<Vec<String>>,
        queried: bool,
        delivered: Option<String>,
    ) -> TraceRecord {
        TraceRecord {
            tick: self.state.tick,
            pose: self.state.pose,
            cmd,
            list_hash: self.state.current_list.name_hash(),
            verdict: self.state.verdict.as_ref().map(|v| v.label().to_owned()),
            goal_point: self.state.goal_point,
            mode: self.mode(),
            queried,
            list,
            delivered,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reasoning::BackendKind;
    use crate::world::{build_corridor, build_house, CorridorStart, RoomCategory};

    fn verdict(name: Option<&str>) -> ReasoningVerdict {
        ReasoningVerdict {
            desired_object: name.map(str::to_owned),
            rationale: String::new(),
            backend: BackendKind::Oracle,
            tick: 0,
        }
    }

    #[test]
    fn standoff_along_the_line() {
        let grid = OccupancyGrid::empty(80, 20, 0.25).unwrap();
        let list = ObjectList::from_entries(0, [("room_202", Point::new(10.0, 2.0))]);
        let (name, p) = resolve_goal(
            &verdict(Some("room_202")),
            &list,
            Pose::new(6.0, 2.0, 0.0),
            &BTreeSet::new(),
            &grid,
            0.5,
        )
        .unwrap();
        assert_eq!(name, "room_202");
        assert!((p.x - 9.5).abs() < 1e-12 && (p.y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fallback_picks_nearest_unvisited() {
        let h1 = build_house(1, RoomCategory::Bedroom).unwrap();
        let list = crate::perception::sense(&h1.world, h1.start, &h1.sensor, 0).unwrap();
        let here = h1.start.point();
        let nearest = list
            .entries
            .iter()
            .min_by(|a, b| here.distance(a.1).total_cmp(&here.distance(b.1)))
            .unwrap()
            .0
            .clone();
        let grid = h1.world.grid();
        let (name, _) = resolve_goal(&verdict(None), &list, h1.start, &BTreeSet::new(), grid, 0.5).unwrap();
        assert_eq!(name, nearest);
        let visited = BTreeSet::from([nearest.clone()]);
        let (second, _) = resolve_goal(&verdict(None), &list, h1.start, &visited, grid, 0.5).unwrap();
        assert_ne!(second, nearest);
        assert!(resolve_goal(
            &verdict(None),
            &ObjectList::new(0),
            h1.start,
            &BTreeSet::new(),
            grid,
            0.5
        )
        .is_none());
    }

    #[test]
    fn goal_point_leaves_occupied_cells() {
        let world = build_corridor(1, CorridorStart::T1).unwrap().world;
        let grid = world.grid();
        let inside_band = Point::new(5.0, 1.1);
        assert!(grid.occupied_at(inside_band));
        let p = nearest_free_center(grid, inside_band).unwrap();
        assert!(!grid.occupied_at(p));
        assert!((p.y - 1.375).abs() < 1e-12, "{p:?}");
    }

    #[test]
    fn termination_rules() {
        let spec = build_corridor(1, CorridorStart::T1).unwrap();
        let mut state = ExecState {
            tick: 0,
            pose: spec.start,
            vel: VelocityCommand::default(),
            current_list: ObjectList::new(0),
            verdict: None,
            target: None,
            goal_point: None,
            visited: BTreeSet::new(),
            idle_ticks: 0,
        };
        assert_eq!(check_termination(&state, &spec, false), TrialStatus::Running);
        assert_eq!(
            check_termination(&state, &spec, true),
            TrialStatus::Failure(FailureReason::Backend)
        );
        state.tick = spec.max_ticks;
        assert_eq!(
            check_termination(&state, &spec, false),
            TrialStatus::Failure(FailureReason::Timeout)
        );
        state.pose = Pose::new(7.0, 2.6, 0.0);
        assert_eq!(check_termination(&state, &spec, false), TrialStatus::Success);

        let house = build_house(2, RoomCategory::Kitchen).unwrap();
        state.tick = 0;
        state.pose = Pose::new(3.0, 6.0, 0.0);
        assert_eq!(check_termination(&state, &house, false), TrialStatus::Success);
        state.pose = house.start;
        state.idle_ticks = 100;
        assert_eq!(
            check_termination(&state, &house, false),
            TrialStatus::Failure(FailureReason::Idle)
        );
    }
}
