//! Deterministic scripted mock backend.
//!
//! A script is an ordered rule list; the first rule whose stage matches and
//! whose matcher (substring or regex) hits the user prompt wins. Rule
//! application is pure, so identical request + script always produce the
//! identical result.

use super::{Backend, CompletionRequest, CompletionResult, StageTag};
use crate::error::{Error, Result};
use regex::Regex;
use serde::Deserialize;
use std::path::Path;
use std::sync::Mutex;

#[derive(Debug, Clone)]
enum Matcher {
    Substring(String),
    Pattern(Regex),
}

impl Matcher {
    fn matches(&self, prompt: &str) -> bool {
        match self {
            Matcher::Substring(s) => prompt.contains(s.as_str()),
            Matcher::Pattern(re) => re.is_match(prompt),
        }
    }
}

/// One scripted response rule. `stage: None` matches any stage (JSONL
/// `"stage": "*"`).
#[derive(Debug, Clone)]
pub struct MockRule {
    stage: Option<StageTag>,
    matcher: Matcher,
    response: String,
}

impl MockRule {
    pub fn substring(stage: impl Into<Option<StageTag>>, needle: &str, response: &str) -> Self {
        Self {
            stage: stage.into(),
            matcher: Matcher::Substring(needle.to_string()),
            response: response.to_string(),
        }
    }

    pub fn pattern(
        stage: impl Into<Option<StageTag>>,
        pattern: &str,
        response: &str,
    ) -> Result<Self> {
        Ok(Self {
            stage: stage.into(),
            matcher: Matcher::Pattern(
                Regex::new(pattern)
                    .map_err(|e| Error::input(format!("bad mock regex {pattern:?}: {e}")))?,
            ),
            response: response.to_string(),
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct MockScript {
    rules: Vec<MockRule>,
    default_response: Option<String>,
}

/// JSONL record: either a rule or `{"default": "..."}`.
#[derive(Deserialize)]
struct ScriptRecord {
    #[serde(default)]
    stage: Option<String>,
    #[serde(default, rename = "match")]
    matcher: Option<String>,
    #[serde(default)]
    regex: bool,
    #[serde(default)]
    response: Option<String>,
    #[serde(default)]
    default: Option<String>,
}

impl MockScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rule(mut self, rule: MockRule) -> Self {
        self.rules.push(rule);
        self
    }

    pub fn with_default(mut self, response: &str) -> Self {
        self.default_response = Some(response.to_string());
        self
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read mock script {}: {e}", path.display())))?;
        Self::parse(&raw).map_err(|e| Error::input(format!("{}: {e}", path.display())))
    }

    pub fn parse(raw: &str) -> Result<Self> {
        let mut script = MockScript::new();
        for (lineno, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: ScriptRecord = serde_json::from_str(line)
                .map_err(|e| Error::input(format!("bad script record on line {}: {e}", lineno + 1)))?;
            if let Some(default) = record.default {
                script.default_response = Some(default);
                continue;
            }
            let (Some(stage), Some(matcher), Some(response)) =
                (record.stage, record.matcher, record.response)
            else {
                return Err(Error::input(format!(
                    "script record on line {} needs stage/match/response or default",
                    lineno + 1
                )));
            };
            let stage = if stage == "*" {
                None
            } else {
                Some(stage.parse::<StageTag>()?)
            };
            let rule = if record.regex {
                MockRule::pattern(stage, &matcher, &response)?
            } else {
                MockRule::substring(stage, &matcher, &response)
            };
            script.rules.push(rule);
        }
        Ok(script)
    }

    fn respond(&self, request: &CompletionRequest) -> Result<String> {
        for rule in &self.rules {
            let stage_ok = rule.stage.map_or(true, |s| s == request.stage_tag);
            if stage_ok && rule.matcher.matches(&request.user_prompt) {
                return Ok(rule.response.clone());
            }
        }
        self.default_response.clone().ok_or_else(|| {
            Error::Script(format!(
                "no rule matched stage {} prompt {:?} and no default response is set",
                request.stage_tag,
                truncate(&request.user_prompt, 120)
            ))
        })
    }
}

fn truncate(s: &str, limit: usize) -> String {
    if s.chars().count() <= limit {
        s.to_string()
    } else {
        let cut: String = s.chars().take(limit).collect();
        format!("{cut}...")
    }
}

/// Scripted backend. Optionally records every request it serves, which lets
/// tests assert on exact prompt content.
pub struct MockBackend {
    id: String,
    script: MockScript,
    recorder: Option<Mutex<Vec<CompletionRequest>>>,
}

impl MockBackend {
    pub fn new(id: &str, script: MockScript) -> Self {
        Self {
            id: format!("mock:{id}"),
            script,
            recorder: None,
        }
    }

    pub fn recording(id: &str, script: MockScript) -> Self {
        Self {
            recorder: Some(Mutex::new(Vec::new())),
            ..Self::new(id, script)
        }
    }

    pub fn recorded_requests(&self) -> Vec<CompletionRequest> {
        self.recorder
            .as_ref()
            .map(|r| r.lock().unwrap().clone())
            .unwrap_or_default()
    }
}

impl Backend for MockBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult> {
        if let Some(recorder) = &self.recorder {
            recorder.lock().unwrap().push(request.clone());
        }
        let text = self.script.respond(request)?;
        Ok(CompletionResult {
            text,
            backend_id: self.id.clone(),
            latency_ms: 0,
            attempt_count: 1,
        })
    }

    fn id(&self) -> &str {
        &self.id
    }
}
