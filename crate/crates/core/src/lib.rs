//! Map-free, context-aware navigation: a simulated object server feeds a
//! reasoning backend that picks which detected object to drive to, and a
//! Dijkstra + DWA stack drives there.

pub mod geometry;
pub mod harness;
pub mod navctl;
pub mod perception;
pub mod planning;
pub mod prompting;
pub mod reasoning;
pub mod world;

pub use geometry::{Point, Pose, Segment};
pub use harness::{
    ablation_fixtures, run_suite, run_trial, AblationScenario, HarnessError, ReferenceConfig, SuiteName, SuiteReport,
    TrialResult,
};
pub use navctl::{Executive, FailureReason, NavConfig, TraceRecord, TrialStatus};
pub use perception::{list_changed, sense, ObjectList, ObjectServer, SensorParams};
pub use planning::{
    dwa_step, extract_path, plan_potential, step_kinematics, DwaParams, Path, PlannerConfig, PotentialField,
    VelocityCommand,
};
pub use prompting::{build_reasoning_prompt, build_unstructured_prompt, PromptBundle, QueryMessage, ReasoningMode};
pub use reasoning::{BackendConfig, BackendKind, CategoryMap, ReasoningVerdict};
pub use world::{
    build_corridor, build_house, load_scenario, save_scenario, CorridorStart, GoalCommand, OccupancyWorld,
    RoomCategory, ScenarioSpec,
};
