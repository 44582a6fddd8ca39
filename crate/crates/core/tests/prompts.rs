//! Rendered prompts against the committed goldens. `DYNACON_BLESS=1`
//! rewrites them.

use std::path::PathBuf;

use dynacon_core::prompting::{
    build_reasoning_prompt, build_unstructured_prompt, ReasoningMode, INSTRUCTION_HEADER, MAIN_TASK_HEADER,
    ROLE_HEADER, UNSTRUCTURED_SENTENCES,
};
use dynacon_core::{GoalCommand, RoomCategory};

pub fn goldens() -> Vec<(&'static str, String)> {
    let room = GoalCommand::room_number(202);
    let kitchen = GoalCommand::room_category(RoomCategory::Kitchen);
    vec![
        (
            "pattern_room_202.txt",
            build_reasoning_prompt(&room, ReasoningMode::Pattern).unwrap().rendered,
        ),
        (
            "categorical_kitchen.txt",
            build_reasoning_prompt(&kitchen, ReasoningMode::Categorical)
                .unwrap()
                .rendered,
        ),
        ("unstructured.txt", build_unstructured_prompt(&room)),
        ("unstructured_kitchen.txt", build_unstructured_prompt(&kitchen)),
    ]
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/prompts")
        .join(name)
}

#[test]
fn prompts_match_goldens() {
    let bless = std::env::var_os("DYNACON_BLESS").is_some_and(|v| v == "1");
    for (name, rendered) in goldens() {
        let path = golden_path(name);
        if bless {
            std::fs::write(&path, &rendered).unwrap();
        }
        let golden = std::fs::read_to_string(&path).unwrap();
        assert_eq!(rendered, golden, "{name} drifted from its golden");
    }
}

#[test]
fn structured_prompts_have_every_section() {
    for (name, rendered) in goldens().into_iter().take(2) {
        for header in [ROLE_HEADER, MAIN_TASK_HEADER, INSTRUCTION_HEADER] {
            assert!(rendered.contains(header), "{name} lacks {header}");
        }
        for part in ["(a)", "(b)", "(c)", "(d)"] {
            assert!(rendered.contains(part), "{name} lacks instruction {part}");
        }
    }
}

#[test]
fn unstructured_prompts_carry_all_six_sentences() {
    for (name, rendered) in goldens().into_iter().skip(2) {
        for sentence in UNSTRUCTURED_SENTENCES {
            assert!(rendered.contains(sentence), "{name} lacks `{sentence}`");
        }
    }
}

#[test]
fn mode_must_match_goal() {
    let room = GoalCommand::room_number(202);
    assert!(build_reasoning_prompt(&room, ReasoningMode::Categorical).is_err());
}
