//! The chat-completion client and the llm backend against a local mock
//! endpoint.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use dynacon_core::harness::{build_scenario, run_trial};
use dynacon_core::prompting::{build_reasoning_prompt, format_goal_command, parse_object_list, ReasoningMode};
use dynacon_core::reasoning::oracle_pattern;
use dynacon_core::reasoning::{query_llm, LlmError};
use dynacon_core::{BackendConfig, GoalCommand, ObjectList, Point, TrialStatus};

/// What the mock does with one request, given the request body.
enum Reply {
    Json(u16, String),
    Stall(Duration),
}

struct Mock {
    url: String,
    bodies: Arc<Mutex<Vec<serde_json::Value>>>,
}

fn completion(content: &str) -> String {
    serde_json::json!({ "choices": [{ "message": { "role": "assistant", "content": content } }] }).to_string()
}

/// Serves one request per connection until the test process exits.
fn serve(script: impl Fn(usize, &serde_json::Value) -> Reply + Send + 'static) -> Mock {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let bodies = Arc::new(Mutex::new(Vec::new()));
    let seen = Arc::clone(&bodies);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 {
                    break;
                }
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                if let Some((name, value)) = line.split_once(':') {
                    if name.eq_ignore_ascii_case("content-length") {
                        length = value.trim().parse().unwrap();
                    }
                }
            }
            let mut body = vec![0; length];
            if reader.read_exact(&mut body).is_err() {
                continue;
            }
            let body: serde_json::Value = serde_json::from_slice(&body).unwrap_or(serde_json::Value::Null);
            let n = {
                let mut seen = seen.lock().unwrap();
                seen.push(body.clone());
                seen.len() - 1
            };
            match script(n, &body) {
                Reply::Json(status, text) => {
                    let head = format!(
                        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                        text.len()
                    );
                    let _ = stream.write_all(head.as_bytes());
                    let _ = stream.write_all(text.as_bytes());
                }
                Reply::Stall(d) => thread::sleep(d),
            }
        }
    });
    Mock { url, bodies }
}

fn config(url: &str) -> BackendConfig {
    let mut c = BackendConfig::llm(url);
    c.backoff_ms = 1;
    c.timeout = 2.0;
    c
}

fn bundle() -> dynacon_core::PromptBundle {
    build_reasoning_prompt(&GoalCommand::room_number(202), ReasoningMode::Pattern).unwrap()
}

#[test]
fn fixed_reply_round_trip() {
    let mock = serve(|_, _| Reply::Json(200, completion("thinking\ndesired_object: room_203")));
    let goal = GoalCommand::room_number(202);
    let history = vec![format_goal_command(&goal, 0)];
    let text = query_llm(&bundle(), &history, &config(&mock.url)).unwrap();
    assert_eq!(text, "thinking\ndesired_object: room_203");

    let bodies = mock.bodies.lock().unwrap();
    assert_eq!(bodies.len(), 1);
    let messages = bodies[0]["messages"].as_array().unwrap();
    assert_eq!(messages[0]["role"], "system");
    assert_eq!(messages[0]["content"], bundle().rendered.as_str());
    assert_eq!(messages[1]["role"], "user");
    assert_eq!(messages[1]["content"], "Go to room 202.");
    assert_eq!(bodies[0]["model"], "gpt-3.5-turbo");
}

#[test]
fn server_errors_are_retried() {
    let mock = serve(|n, _| {
        if n < 2 {
            Reply::Json(503, "{}".into())
        } else {
            Reply::Json(200, completion("desired_object: None"))
        }
    });
    let text = query_llm(&bundle(), &[], &config(&mock.url)).unwrap();
    assert_eq!(text, "desired_object: None");
    assert_eq!(mock.bodies.lock().unwrap().len(), 3);
}

#[test]
fn persistent_server_errors_exhaust_retries() {
    let mock = serve(|_, _| Reply::Json(500, "{}".into()));
    let err = query_llm(&bundle(), &[], &config(&mock.url)).unwrap_err();
    assert!(matches!(err, LlmError::Transport { attempts: 3, .. }), "{err:?}");
    assert_eq!(mock.bodies.lock().unwrap().len(), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let mock = serve(|_, _| Reply::Json(401, r#"{"error":"bad key"}"#.into()));
    let err = query_llm(&bundle(), &[], &config(&mock.url)).unwrap_err();
    assert!(matches!(err, LlmError::Status { status: 401, .. }), "{err:?}");
    assert_eq!(mock.bodies.lock().unwrap().len(), 1);
}

#[test]
fn slow_endpoint_times_out() {
    let mock = serve(|_, _| Reply::Stall(Duration::from_millis(800)));
    let mut c = config(&mock.url);
    c.timeout = 0.1;
    let err = query_llm(&bundle(), &[], &c).unwrap_err();
    assert!(matches!(err, LlmError::Timeout { attempts: 3 }), "{err:?}");
}

#[test]
fn garbage_completion_is_a_decode_error() {
    let mock = serve(|_, _| Reply::Json(200, r#"{"choices":[]}"#.into()));
    let err = query_llm(&bundle(), &[], &config(&mock.url)).unwrap_err();
    assert!(matches!(err, LlmError::Decode(_)), "{err:?}");
}

/// A mock model that answers like the pattern oracle, reading the latest
/// list from the last user message.
fn oracle_model(_: usize, body: &serde_json::Value) -> Reply {
    let messages = body["messages"].as_array().unwrap();
    let last = messages.last().unwrap()["content"].as_str().unwrap();
    let names = parse_object_list(last).unwrap();
    let list = ObjectList::from_entries(0, names.iter().map(|n| (n.as_str(), Point::new(0.0, 0.0))));
    let verdict = oracle_pattern(&list, 202, None);
    Reply::Json(200, completion(&format!("desired_object: {}", verdict.label())))
}

#[test]
fn llm_backend_drives_a_trial() {
    let mock = serve(oracle_model);
    let spec = build_scenario("corridor1_t1").unwrap();
    let result = run_trial(&spec, &config(&mock.url), 0).unwrap();
    assert_eq!(result.status, TrialStatus::Success);
    assert_eq!(result.queries as usize, mock.bodies.lock().unwrap().len());
    let last = result.verdict_history.last().unwrap();
    assert_eq!(last.desired_object.as_deref(), Some("room_202"));
}

#[test]
fn verdicts_arrive_after_the_configured_latency() {
    let mock = serve(oracle_model);
    let spec = build_scenario("corridor1_t1").unwrap();
    let mut c = config(&mock.url);
    c.latency_ticks = 10;
    let result = run_trial(&spec, &c, 0).unwrap();
    assert_eq!(result.status, TrialStatus::Success);
    let queries: Vec<u64> = result.trace.iter().filter(|r| r.queried).map(|r| r.tick).collect();
    let deliveries: Vec<u64> = result
        .trace
        .iter()
        .filter(|r| r.delivered.is_some())
        .map(|r| r.tick)
        .collect();
    assert!(!queries.is_empty());
    assert_eq!(queries.len(), deliveries.len());
    for (q, d) in queries.iter().zip(&deliveries) {
        assert_eq!(d - q, 10);
    }
    // Nothing drives the robot before the first verdict lands.
    assert!(result.trace[..10].iter().all(|r| r.goal_point.is_none()));
}

#[test]
fn backend_failure_aborts_the_trial() {
    let mock = serve(|_, _| Reply::Json(500, "{}".into()));
    let spec = build_scenario("corridor1_t1").unwrap();
    let result = run_trial(&spec, &config(&mock.url), 0).unwrap();
    assert_eq!(
        result.status,
        TrialStatus::Failure(dynacon_core::FailureReason::Backend)
    );
    assert!(result.backend_error.unwrap().contains("500"));
}
