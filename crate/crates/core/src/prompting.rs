//! Reasoning prompt construction and the chat messages sent after it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::perception::ObjectList;
use crate::world::{GoalCommand, GoalTarget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasoningMode {
    Pattern,
    Categorical,
}

impl ReasoningMode {
    /// The mode a goal calls for.
    pub fn for_goal(goal: &GoalCommand) -> Self {
        match goal.target {
            GoalTarget::RoomNumber(_) => ReasoningMode::Pattern,
            GoalTarget::RoomCategory(_) => ReasoningMode::Categorical,
        }
    }
}

impl fmt::Display for ReasoningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReasoningMode::Pattern => "pattern",
            ReasoningMode::Categorical => "categorical",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("goal `{goal}` cannot be reasoned about in {mode} mode")]
    ModeMismatch { goal: String, mode: ReasoningMode },
    #[error("malformed object list `{0}`")]
    MalformedList(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instruction {
    pub a_list_format: String,
    pub b_realtime_context: String,
    pub c_output_format: String,
    pub d_example_scenarios: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PromptBundle {
    pub mode: ReasoningMode,
    pub role_text: String,
    pub main_task_text: String,
    pub instruction: Instruction,
    pub rendered: String,
}

pub const ROLE_HEADER: &str = "## Role";
pub const MAIN_TASK_HEADER: &str = "## Main Task";
pub const INSTRUCTION_HEADER: &str = "## Instruction";

/// Prefix of the single reply line the model must end with.
pub const VERDICT_KEY: &str = "desired_object:";

const ROLE: &str = "You are an AI assistant for a mobile robot that has to reach a destination \
inside a building it has no map of. The robot can only report the names of objects its \
sensor currently detects, and you decide which of those objects it should drive to next.";

const PATTERN_EXAMPLE: &str = "(d) Example: room numbers along a corridor follow a pattern. \
If the plates near the robot read 105, 104 and 103 in driving order, the numbers are \
decreasing, so when the robot is currently located at room 103 the position of room number \
101 will be farther than 102. For the goal room 101 you would answer room_103 now and move \
on to room_102 once it appears in the list.";

const CATEGORICAL_EXAMPLE: &str = "(d) Example: objects tell you which room they belong to. \
To reach the kitchen, move to the sink to reach the kitchen, or to any other kitchen \
appliance that is listed; to reach the living room, a sofa or a television is a good \
target. If nothing in the list belongs to the requested room, answer None.";

/// The six sentences of the unstructured baseline, in order.
pub const UNSTRUCTURED_SENTENCES: [&str; 6] = [
    "Find the desired object using context-aware navigation.",
    "The desired object is within the object list most relevant to the desired goal.",
    "The object list is provided whenever it undergoes changes.",
    "If a room number is obtained from the room number plate, calculate the absolute difference between the desired goal and each room number plate. Select the one with the smallest absolute difference as the desired object.",
    "If a specific room is specified, identify the object most suitable for categorization within the given room.",
    "Going forward, I will provide you with my desired goal and an updated object list. Show me your process for reaching the desired goal.",
];

fn instruction(mode: ReasoningMode) -> Instruction {
    let a_list_format = "(a) The object list arrives as names in braces separated by a comma and \
a space, for example {chair, room_201, sink}. Room number plates are named room_<number>; \
every other name is a piece of furniture or an appliance. An empty list is written {}."
        .to_owned();
    let b_realtime_context = "(b) The list describes what the robot detects right now. A new \
list is sent only when objects appear or disappear, so the latest list replaces all \
earlier ones while the robot keeps moving toward your last answer."
        .to_owned();
    let c_output_format = format!(
        "(c) Choose exactly one object from the latest list, or None if no listed object \
helps. You may reason first, but the last line of your reply must be `{VERDICT_KEY} <name>` \
using a name copied from the list, or `{VERDICT_KEY} None`."
    );
    let d_example_scenarios = match mode {
        ReasoningMode::Pattern => PATTERN_EXAMPLE,
        ReasoningMode::Categorical => CATEGORICAL_EXAMPLE,
    }
    .to_owned();
    Instruction {
        a_list_format,
        b_realtime_context,
        c_output_format,
        d_example_scenarios,
    }
}

/// Structured Role / Main Task / Instruction prompt, sent once per trial as
/// the system message.
pub fn build_reasoning_prompt(goal: &GoalCommand, mode: ReasoningMode) -> Result<PromptBundle, PromptError> {
    if ReasoningMode::for_goal(goal) != mode {
        return Err(PromptError::ModeMismatch {
            goal: goal.raw_text.clone(),
            mode,
        });
    }
    let focus = match mode {
        ReasoningMode::Pattern => "Use the numerical pattern of the room number plates in the list.",
        ReasoningMode::Categorical => "Use the room each listed object typically belongs to.",
    };
    let main_task_text = format!(
        "Your objective is identifying the object most pertinent to the desired destination. \
{focus} The destination arrives as a short sentence; for this trial it is: {}",
        goal.raw_text
    );
    let instruction = instruction(mode);
    let rendered = format!(
        "{ROLE_HEADER}\n{ROLE}\n\n{MAIN_TASK_HEADER}\n{main_task_text}\n\n{INSTRUCTION_HEADER}\n{}\n{}\n{}\n{}\n",
        instruction.a_list_format,
        instruction.b_realtime_context,
        instruction.c_output_format,
        instruction.d_example_scenarios,
    );
    Ok(PromptBundle {
        mode,
        role_text: ROLE.to_owned(),
        main_task_text,
        instruction,
        rendered,
    })
}

/// Baseline prompt without the Role / Main Task / Instruction structure.
pub fn build_unstructured_prompt(goal: &GoalCommand) -> String {
    let mut text = String::new();
    for sentence in UNSTRUCTURED_SENTENCES {
        text.push_str("- ");
        text.push_str(sentence);
        text.push('\n');
    }
    text.push_str("\nDesired goal: ");
    text.push_str(&goal.raw_text);
    text.push('\n');
    text
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    SystemSetup,
    GoalCommand,
    ListUpdate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryMessage {
    pub kind: MessageKind,
    pub text: String,
    pub tick: u64,
}

pub fn system_setup(bundle: &PromptBundle, tick: u64) -> QueryMessage {
    QueryMessage {
        kind: MessageKind::SystemSetup,
        text: bundle.rendered.clone(),
        tick,
    }
}

pub fn format_goal_command(goal: &GoalCommand, tick: u64) -> QueryMessage {
    QueryMessage {
        kind: MessageKind::GoalCommand,
        text: goal.raw_text.clone(),
        tick,
    }
}

/// `{a, b, c}` in list order.
pub fn format_list_update(list: &ObjectList) -> QueryMessage {
    QueryMessage {
        kind: MessageKind::ListUpdate,
        text: format_names(list.names()),
        tick: list.tick,
    }
}

pub fn format_names<'a>(names: impl IntoIterator<Item = &'a str>) -> String {
    let joined: Vec<&str> = names.into_iter().collect();
    format!("{{{}}}", joined.join(", "))
}

/// Inverse of [`format_list_update`].
pub fn parse_object_list(text: &str) -> Result<Vec<String>, PromptError> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| PromptError::MalformedList(text.to_owned()))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|name| {
            let name = name.trim();
            if name.is_empty() || name.contains(['{', '}']) {
                Err(PromptError::MalformedList(text.to_owned()))
            } else {
                Ok(name.to_owned())
            }
        })
        .collect()
}
