use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{BackendConfig, BackendKind};
use crate::prompting::{PromptBundle, QueryMessage};

const MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("llm backend is not selected")]
    NotLlm,
    #[error("request timed out after {attempts} attempts")]
    Timeout { attempts: u32 },
    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint answered HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed completion: {0}")]
    Decode(String),
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: AssistantMessage,
}

#[derive(Deserialize)]
struct AssistantMessage {
    content: String,
}

enum Attempt {
    Done(String),
    Retry { timeout: bool, message: String },
    Fatal(LlmError),
}

fn attempt(client: &reqwest::blocking::Client, config: &BackendConfig, endpoint: &str, body: &ChatRequest) -> Attempt {
    let mut request = client.post(endpoint).json(body);
    if let Some(key) = &config.api_key {
        request = request.bearer_auth(key);
    }
    let response = match request.send() {
        Ok(r) => r,
        Err(e) => {
            return Attempt::Retry {
                timeout: e.is_timeout(),
                message: e.to_string(),
            }
        }
    };
    let status = response.status();
    if status.is_server_error() {
        return Attempt::Retry {
            timeout: false,
            message: format!("HTTP {}", status.as_u16()),
        };
    }
    let text = match response.text() {
        Ok(t) => t,
        Err(e) => {
            return Attempt::Retry {
                timeout: e.is_timeout(),
                message: e.to_string(),
            }
        }
    };
    if !status.is_success() {
        return Attempt::Fatal(LlmError::Status {
            status: status.as_u16(),
            body: text,
        });
    }
    match serde_json::from_str::<ChatResponse>(&text) {
        Ok(mut parsed) if !parsed.choices.is_empty() => Attempt::Done(parsed.choices.swap_remove(0).message.content),
        Ok(_) => Attempt::Fatal(LlmError::Decode("`choices` is empty".into())),
        Err(e) => Attempt::Fatal(LlmError::Decode(e.to_string())),
    }
}

/// One chat-completion round trip: the rendered prompt as the system
/// message followed by `history` as user messages. Transport failures,
/// timeouts and 5xx answers are retried twice with exponential backoff.
pub fn query_llm(bundle: &PromptBundle, history: &[QueryMessage], config: &BackendConfig) -> Result<String, LlmError> {
    if config.kind != BackendKind::Llm {
        return Err(LlmError::NotLlm);
    }
    let endpoint = config.endpoint.as_deref().ok_or(LlmError::NotLlm)?;
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs_f64(config.timeout))
        .build()
        .map_err(|e| LlmError::Transport {
            attempts: 0,
            message: e.to_string(),
        })?;
    let mut messages = vec![ChatMessage {
        role: "system",
        content: &bundle.rendered,
    }];
    messages.extend(history.iter().map(|m| ChatMessage {
        role: "user",
        content: &m.text,
    }));
    let body = ChatRequest {
        model: &config.model,
        messages,
    };

    let mut last = (false, String::new());
    for n in 0..MAX_ATTEMPTS {
        if n > 0 {
            thread::sleep(Duration::from_millis(config.backoff_ms << (n - 1)));
        }
        match attempt(&client, config, endpoint, &body) {
            Attempt::Done(text) => return Ok(text),
            Attempt::Fatal(err) => return Err(err),
            Attempt::Retry { timeout, message } => {
                log::debug!("llm attempt {} failed: {message}", n + 1);
                last = (timeout, message);
            }
        }
    }
    Err(if last.0 {
        LlmError::Timeout { attempts: MAX_ATTEMPTS }
    } else {
        LlmError::Transport {
            attempts: MAX_ATTEMPTS,
            message: last.1,
        }
    })
}
