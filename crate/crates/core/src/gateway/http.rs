//! Live OpenAI-compatible chat-completions backend.

use super::{Backend, CompletionRequest, CompletionResult};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

const MAX_ATTEMPTS: u32 = 3;
const BACKOFF_BASE_MS: u64 = 250;

#[derive(Debug, Clone)]
pub struct HttpConfig {
    /// Base URL of the server; `/chat/completions` is appended unless the
    /// URL already ends with it.
    pub url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
}

impl HttpConfig {
    fn endpoint(&self) -> String {
        if self.url.ends_with("/chat/completions") {
            self.url.clone()
        } else {
            format!("{}/chat/completions", self.url.trim_end_matches('/'))
        }
    }
}

pub struct HttpBackend {
    id: String,
    config: HttpConfig,
    client: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    max_tokens: u32,
    temperature: f64,
    seed: u64,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireResponseMessage,
}

#[derive(Deserialize)]
struct WireResponseMessage {
    content: Option<String>,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| Error::input(format!("cannot build http client: {e}")))?;
        Ok(Self {
            id: format!("http:{}", config.model),
            config,
            client,
        })
    }

    fn attempt(&self, request: &CompletionRequest) -> std::result::Result<String, String> {
        let wire = WireRequest {
            model: &self.config.model,
            messages: vec![
                WireMessage {
                    role: "system",
                    content: &request.system_prompt,
                },
                WireMessage {
                    role: "user",
                    content: &request.user_prompt,
                },
            ],
            max_tokens: request.max_tokens,
            temperature: request.temperature,
            seed: request.seed,
        };
        let mut builder = self.client.post(self.config.endpoint()).json(&wire);
        if let Some(key) = &self.config.api_key {
            builder = builder.bearer_auth(key);
        }
        let response = builder.send().map_err(|e| format!("transport: {e}"))?;
        let status = response.status();
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            return Err(format!("http {}: {}", status.as_u16(), body.trim()));
        }
        let parsed: WireResponse = response.json().map_err(|e| format!("bad response body: {e}"))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| "response carried no message content".to_string())
    }
}

impl Backend for HttpBackend {
    /// Issues the call with up to three attempts and exponential backoff.
    /// Requests carry no server-side state, so retries are idempotent.
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult> {
        let start = Instant::now();
        let mut last_error = String::new();
        for attempt in 1..=MAX_ATTEMPTS {
            match self.attempt(request) {
                Ok(text) => {
                    return Ok(CompletionResult {
                        text,
                        backend_id: self.id.clone(),
                        latency_ms: start.elapsed().as_millis() as u64,
                        attempt_count: attempt,
                    });
                }
                Err(e) => last_error = e,
            }
            if attempt < MAX_ATTEMPTS {
                std::thread::sleep(Duration::from_millis(
                    BACKOFF_BASE_MS << (attempt - 1),
                ));
            }
        }
        Err(Error::Backend {
            message: last_error,
            attempts: MAX_ATTEMPTS,
        })
    }

    fn id(&self) -> &str {
        &self.id
    }
}
