//! Trial and suite runners, the prompt ablation fixtures and reports.

mod catalog;
mod report;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use catalog::{all_entries, build_scenario, find_entry, CatalogEntry, SuiteName, CATEGORY_SUITE, PATTERN_SUITE};
pub use report::{render_report, render_svg, render_table, Rendered, ReportFormat, TrialSummary};

use crate::geometry::Pose;
use crate::navctl::{Executive, NavConfig, NavError, TraceRecord, TrialStatus};
use crate::perception::{sense, ObjectList, SensorParams};
use crate::planning::PlannerConfig;
use crate::prompting::{
    build_reasoning_prompt, build_unstructured_prompt, format_list_update, PromptBundle, ReasoningMode,
};
use crate::reasoning::{reason, BackendConfig, CategoryMap, ReasoningVerdict};
use crate::world::{build_corridor, build_house, CorridorStart, GoalCommand, RoomCategory, ScenarioSpec, WorldError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Nav(#[from] NavError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<crate::reasoning::ReasoningError> for HarnessError {
    fn from(e: crate::reasoning::ReasoningError) -> Self {
        HarnessError::Nav(NavError::Reasoning(e))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub scenario_id: String,
    pub status: TrialStatus,
    pub ticks: u64,
    pub seed: u64,
    pub queries: u64,
    pub trajectory: Vec<Pose>,
    pub verdict_history: Vec<ReasoningVerdict>,
    pub list_history: Vec<ObjectList>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend_error: Option<String>,
    #[serde(skip)]
    pub trace: Vec<TraceRecord>,
}

impl TrialResult {
    /// One JSON object per tick, newline terminated.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.trace {
            out.push_str(&serde_json::to_string(record).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn write_trace(&self, path: impl AsRef<Path>) -> Result<(), HarnessError> {
        write_file(path.as_ref(), &self.trace_jsonl())
    }
}

/// Runs one scenario to termination. The seed is recorded only; under the
/// oracle backend the trial is fully deterministic.
pub fn run_trial(scenario: &ScenarioSpec, backend: &BackendConfig, seed: u64) -> Result<TrialResult, HarnessError> {
    let mut exec = Executive::new(scenario, backend.clone(), CategoryMap::default())?;
    let mut trajectory = vec![scenario.start];
    let mut trace = Vec::new();
    while !exec.status().is_terminal() {
        let record = exec.tick()?;
        trajectory.push(record.pose);
        trace.push(record);
    }
    if let Some(err) = exec.backend_error() {
        log::warn!("{}: backend aborted the trial: {err}", scenario.id_or("scenario"));
    }
    Ok(TrialResult {
        scenario_id: scenario.id_or("scenario").to_owned(),
        status: exec.status(),
        ticks: exec.state().tick,
        seed,
        queries: exec.queries(),
        trajectory,
        verdict_history: exec.verdicts().to_vec(),
        list_history: exec.lists().to_vec(),
        backend_error: exec.backend_error().map(ToString::to_string),
        trace,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub trials: Vec<TrialResult>,
    pub expected: Vec<bool>,
    pub successes: usize,
    /// Percent, rounded to one decimal.
    pub success_rate: f64,
}

impl SuiteReport {
    pub fn from_trials(suite: SuiteName, trials: Vec<TrialResult>, expected: Vec<bool>) -> Self {
        let successes = trials.iter().filter(|t| t.status.is_success()).count();
        Self {
            suite,
            success_rate: success_rate(successes, trials.len()),
            trials,
            expected,
            successes,
        }
    }

    /// Scenario ids whose outcome differs from the expected one.
    pub fn mismatches(&self) -> Vec<&str> {
        self.trials
            .iter()
            .zip(&self.expected)
            .filter(|(t, &ok)| t.status.is_success() != ok)
            .map(|(t, _)| t.scenario_id.as_str())
            .collect()
    }
}

pub fn success_rate(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (1000.0 * successes as f64 / trials as f64).round() / 10.0
}

/// Runs every bundled scenario of a suite in parallel. Rows come back in
/// catalog order.
pub fn run_suite(suite: SuiteName, backend: &BackendConfig) -> Result<SuiteReport, HarnessError> {
    let entries = suite.entries();
    let trials = entries
        .par_iter()
        .map(|entry| run_trial(&entry.load()?, backend, 0))
        .collect::<Result<Vec<_>, _>>()?;
    let expected = entries.iter().map(|e| e.expect_success).collect();
    Ok(SuiteReport::from_trials(suite, trials, expected))
}

/// One ablation scenario: both prompt variants, the object lists fed at
/// t = 1, 2, ... and the oracle's verdict after each.
#[derive(Debug, Clone, Serialize)]
pub struct AblationScenario {
    pub name: String,
    pub goal: GoalCommand,
    pub structured: PromptBundle,
    pub unstructured: String,
    pub lists: Vec<ObjectList>,
    pub expected: Vec<String>,
}

fn sensed(spec: &ScenarioSpec, poses: &[Pose]) -> Result<Vec<ObjectList>, HarnessError> {
    poses
        .iter()
        .enumerate()
        .map(|(i, &pose)| sense(&spec.world, pose, &spec.sensor, i as u64 + 1).map_err(|e| NavError::from(e).into()))
        .collect()
}

/// Scenario 1 (goal room 202, Corridor 2 heading down from its far end)
/// and Scenario 2 (goal kitchen, House 3 through the bedroom door).
pub fn ablation_fixtures() -> Result<Vec<AblationScenario>, HarnessError> {
    use std::f64::consts::PI;
    let corridor = build_corridor(2, CorridorStart::T6)?;
    let corridor_poses = [corridor.start, Pose::new(11.5, 2.5, PI), Pose::new(8.0, 2.5, PI)];
    let house = build_house(3, RoomCategory::Kitchen)?;
    let house_poses = [Pose::new(4.3, 1.6, 0.0), Pose::new(7.5, 2.0, 0.0)];
    let setups = [
        (
            "scenario1",
            GoalCommand::room_number(202),
            sensed(&corridor, &corridor_poses)?,
        ),
        (
            "scenario2",
            GoalCommand::room_category(RoomCategory::Kitchen),
            sensed(&house, &house_poses)?,
        ),
    ];
    let map = CategoryMap::default();
    setups
        .into_iter()
        .map(|(name, goal, lists)| {
            let mut expected = Vec::new();
            let mut incumbent: Option<String> = None;
            for list in &lists {
                let verdict = reason(&goal, list, incumbent.as_deref(), &map)?;
                expected.push(verdict.label().to_owned());
                incumbent = verdict.desired_object;
            }
            Ok(AblationScenario {
                name: name.to_owned(),
                structured: build_reasoning_prompt(&goal, ReasoningMode::for_goal(&goal))
                    .map_err(crate::reasoning::ReasoningError::from)?,
                unstructured: build_unstructured_prompt(&goal),
                goal,
                lists,
                expected,
            })
        })
        .collect()
}

/// Writes `<name>_structured.txt`, `<name>_unstructured.txt`,
/// `<name>_lists.txt` per scenario plus `expected.json`.
pub fn write_ablation(dir: impl AsRef<Path>, scenarios: &[AblationScenario]) -> Result<Vec<String>, HarnessError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let mut expected = serde_json::Map::new();
    for s in scenarios {
        let lists: String = s.lists.iter().map(|l| format_list_update(l).text + "\n").collect();
        for (suffix, body) in [
            ("structured.txt", s.structured.rendered.as_str()),
            ("unstructured.txt", s.unstructured.as_str()),
            ("lists.txt", lists.as_str()),
        ] {
            let name = format!("{}_{suffix}", s.name);
            write_file(&dir.join(&name), body)?;
            written.push(name);
        }
        expected.insert(s.name.clone(), serde_json::json!(s.expected));
    }
    let text = serde_json::to_string_pretty(&expected).expect("json") + "\n";
    write_file(&dir.join("expected.json"), &text)?;
    written.push("expected.json".into());
    Ok(written)
}

/// Every tunable with its default value, as stored in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[derive(Default)]
pub struct ReferenceConfig {
    pub sensor: SensorParams,
    pub planner: PlannerConfig,
    pub executive: NavConfig,
    pub backend: BackendConfig,
}
