//! Turns the goal and the current object list into a desired object, either
//! with the deterministic rule oracle or through a chat-completion endpoint.

mod llm;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use llm::{query_llm, LlmError};

use crate::perception::ObjectList;
use crate::prompting::{
    build_reasoning_prompt, format_goal_command, format_list_update, PromptBundle, PromptError, QueryMessage,
    ReasoningMode, VERDICT_KEY,
};
use crate::world::{plate_number, GoalCommand, GoalTarget, RoomCategory};

#[derive(Debug, thiserror::Error)]
pub enum ReasoningError {
    #[error("no category is configured for object stem `{0}`")]
    UnmappedStem(String),
    #[error("reply has no `desired_object:` line: {0:?}")]
    Unparseable(String),
    #[error("reply names `{0}`, which is not in the object list")]
    Hallucinated(String),
    #[error("backend configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Llm(#[from] LlmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Oracle,
    Llm,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Oracle => "oracle",
            BackendKind::Llm => "llm",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasoningVerdict {
    pub desired_object: Option<String>,
    pub rationale: String,
    pub backend: BackendKind,
    pub tick: u64,
}

impl ReasoningVerdict {
    /// `None` is rendered the way the reply grammar spells it.
    pub fn label(&self) -> &str {
        self.desired_object.as_deref().unwrap_or("None")
    }
}

pub const ENDPOINT_ENV: &str = "DYNACON_LLM_ENDPOINT";
pub const KEY_ENV: &str = "DYNACON_LLM_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    #[serde(skip)]
    pub api_key: Option<String>,
    pub model: String,
    /// Per-request timeout, seconds.
    pub timeout: f64,
    /// Ticks between a query and the moment its verdict becomes visible.
    pub latency_ticks: u64,
    /// First retry delay; doubled on each further retry.
    pub backoff_ms: u64,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            kind: BackendKind::Oracle,
            endpoint: None,
            api_key: None,
            model: "gpt-3.5-turbo".into(),
            timeout: 30.0,
            latency_ticks: 0,
            backoff_ms: 250,
        }
    }
}

impl BackendConfig {
    pub fn oracle() -> Self {
        Self::default()
    }

    pub fn llm(endpoint: impl Into<String>) -> Self {
        Self {
            kind: BackendKind::Llm,
            endpoint: Some(endpoint.into()),
            ..Self::default()
        }
    }

    /// LLM backend configured from `DYNACON_LLM_ENDPOINT` and
    /// `DYNACON_LLM_KEY`.
    pub fn llm_from_env() -> Result<Self, ReasoningError> {
        let endpoint =
            std::env::var(ENDPOINT_ENV).map_err(|_| ReasoningError::Config(format!("{ENDPOINT_ENV} is not set")))?;
        let mut config = Self::llm(endpoint);
        config.api_key = std::env::var(KEY_ENV).ok();
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ReasoningError> {
        if self.kind == BackendKind::Llm && self.endpoint.as_deref().is_none_or(str::is_empty) {
            return Err(ReasoningError::Config("the llm backend needs an endpoint".into()));
        }
        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return Err(ReasoningError::Config(format!(
                "timeout must be positive, got {}",
                self.timeout
            )));
        }
        Ok(())
    }
}

/// Furniture name stem to room category. The stem of `chair_2` is `chair`;
/// room plates (`room_205`) have stem `room`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryMap {
    stems: BTreeMap<String, RoomCategory>,
}

impl Default for CategoryMap {
    fn default() -> Self {
        use RoomCategory::*;
        let table: [(RoomCategory, &[&str]); 6] = [
            (
                Kitchen,
                &[
                    "refrigerator",
                    "sink",
                    "cooking_bench",
                    "stove",
                    "oven",
                    "microwave",
                    "toaster",
                    "dishwasher",
                    "table",
                    "chair",
                ],
            ),
            (
                LivingRoom,
                &[
                    "sofa",
                    "television",
                    "tv_cabinet",
                    "coffee_table",
                    "armchair",
                    "fireplace",
                ],
            ),
            (Bedroom, &["bed", "wardrobe", "nightstand", "dresser", "desk"]),
            (
                HomeGym,
                &[
                    "treadmill",
                    "dumbbell",
                    "exercise_bike",
                    "yoga_mat",
                    "weight_bench",
                    "rowing_machine",
                ],
            ),
            (Corridor, &["room", "shoe_rack", "coat_rack"]),
            (Other, &["painting", "shelf", "plant", "lamp"]),
        ];
        let stems = table
            .into_iter()
            .flat_map(|(cat, names)| names.iter().map(move |n| ((*n).to_owned(), cat)))
            .collect();
        Self { stems }
    }
}

impl CategoryMap {
    pub fn empty() -> Self {
        Self { stems: BTreeMap::new() }
    }

    pub fn insert(&mut self, stem: impl Into<String>, category: RoomCategory) {
        self.stems.insert(stem.into(), category);
    }

    pub fn stems(&self) -> impl Iterator<Item = (&str, RoomCategory)> {
        self.stems.iter().map(|(s, c)| (s.as_str(), *c))
    }

    pub fn category_of(&self, name: &str) -> Result<RoomCategory, ReasoningError> {
        let stem = name_stem(name);
        self.stems
            .get(stem)
            .copied()
            .ok_or_else(|| ReasoningError::UnmappedStem(stem.to_owned()))
    }
}

/// Strips one trailing `_<digits>` suffix.
pub fn name_stem(name: &str) -> &str {
    match name.rsplit_once('_') {
        Some((stem, digits))
            if !stem.is_empty() && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) =>
        {
            stem
        }
        _ => name,
    }
}

/// Plate closest in number to the goal. Ties keep the incumbent, otherwise
/// the lower number wins.
pub fn oracle_pattern(list: &ObjectList, goal_number: u32, incumbent: Option<&str>) -> ReasoningVerdict {
    let diff = |n: u32| n.abs_diff(goal_number);
    let mut best: Option<(u32, &str)> = None;
    for name in list.names() {
        let Some(n) = plate_number(name) else { continue };
        best = match best {
            None => Some((n, name)),
            Some((b, bname)) => {
                let better = diff(n) < diff(b)
                    || (diff(n) == diff(b) && Some(name) == incumbent)
                    || (diff(n) == diff(b) && Some(bname) != incumbent && n < b);
                if better {
                    Some((n, name))
                } else {
                    Some((b, bname))
                }
            }
        };
    }
    let (desired_object, rationale) = match best {
        Some((n, name)) => (
            Some(name.to_owned()),
            format!(
                "|{goal_number} - {n}| = {} is the smallest difference in the list",
                diff(n)
            ),
        ),
        None => (None, "no room number plate in the list".to_owned()),
    };
    ReasoningVerdict {
        desired_object,
        rationale,
        backend: BackendKind::Oracle,
        tick: list.tick,
    }
}

/// Lexicographically first listed object of the goal category.
pub fn oracle_categorical(
    list: &ObjectList,
    goal: RoomCategory,
    map: &CategoryMap,
) -> Result<ReasoningVerdict, ReasoningError> {
    let mut found = None;
    for name in list.names() {
        let category = map.category_of(name)?;
        if found.is_none() && category == goal {
            found = Some(name);
        }
    }
    let rationale = match found {
        Some(name) => format!("{name} belongs in the {}", goal.phrase()),
        None => format!("nothing in the list belongs in the {}", goal.phrase()),
    };
    Ok(ReasoningVerdict {
        desired_object: found.map(str::to_owned),
        rationale,
        backend: BackendKind::Oracle,
        tick: list.tick,
    })
}

/// Reads the last `desired_object: <token>` line of a reply.
pub fn parse_verdict(
    raw: &str,
    list: &ObjectList,
    backend: BackendKind,
    tick: u64,
) -> Result<ReasoningVerdict, ReasoningError> {
    let token = raw
        .lines()
        .rev()
        .find_map(|line| {
            let line = line.trim().trim_matches(['`', '*']).trim();
            line.strip_prefix(VERDICT_KEY)
        })
        .map(|rest| {
            rest.trim()
                .trim_end_matches('.')
                .trim_matches(['`', '"', '\'', '*'])
                .trim()
        })
        .ok_or_else(|| ReasoningError::Unparseable(raw.to_owned()))?;
    let desired_object = match token {
        "None" => None,
        "" => return Err(ReasoningError::Unparseable(raw.to_owned())),
        name if list.contains(name) => Some(name.to_owned()),
        name => return Err(ReasoningError::Hallucinated(name.to_owned())),
    };
    Ok(ReasoningVerdict {
        desired_object,
        rationale: raw.trim().to_owned(),
        backend,
        tick,
    })
}

/// Per-trial reasoning session. For the llm backend it keeps the system
/// prompt and the chat history; the prompt is built once per trial.
#[derive(Debug, Clone)]
pub struct Reasoner {
    config: BackendConfig,
    map: CategoryMap,
    goal: GoalCommand,
    bundle: PromptBundle,
    history: Vec<QueryMessage>,
    queries: u64,
}

impl Reasoner {
    pub fn new(goal: &GoalCommand, config: BackendConfig, map: CategoryMap) -> Result<Self, ReasoningError> {
        config.validate()?;
        let bundle = build_reasoning_prompt(goal, ReasoningMode::for_goal(goal))?;
        Ok(Self {
            config,
            map,
            goal: goal.clone(),
            bundle,
            history: Vec::new(),
            queries: 0,
        })
    }

    pub fn config(&self) -> &BackendConfig {
        &self.config
    }

    pub fn bundle(&self) -> &PromptBundle {
        &self.bundle
    }

    pub fn history(&self) -> &[QueryMessage] {
        &self.history
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// One reasoning call on the current list.
    pub fn reason(
        &mut self,
        list: &ObjectList,
        incumbent: Option<&str>,
        tick: u64,
    ) -> Result<ReasoningVerdict, ReasoningError> {
        self.queries += 1;
        match self.config.kind {
            BackendKind::Oracle => {
                let mut verdict = match self.goal.target {
                    GoalTarget::RoomNumber(n) => oracle_pattern(list, n, incumbent),
                    GoalTarget::RoomCategory(c) => oracle_categorical(list, c, &self.map)?,
                };
                verdict.tick = tick;
                Ok(verdict)
            }
            BackendKind::Llm => {
                if self.history.is_empty() {
                    self.history.push(format_goal_command(&self.goal, tick));
                }
                let mut update = format_list_update(list);
                update.tick = tick;
                self.history.push(update);
                let raw = query_llm(&self.bundle, &self.history, &self.config)?;
                parse_verdict(&raw, list, BackendKind::Llm, tick)
            }
        }
    }
}

/// Stateless oracle dispatch.
pub fn reason(
    goal: &GoalCommand,
    list: &ObjectList,
    incumbent: Option<&str>,
    map: &CategoryMap,
) -> Result<ReasoningVerdict, ReasoningError> {
    match goal.target {
        GoalTarget::RoomNumber(n) => Ok(oracle_pattern(list, n, incumbent)),
        GoalTarget::RoomCategory(c) => oracle_categorical(list, c, map),
    }
}
