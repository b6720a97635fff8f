//! Shared plumbing for LLM-backed stages.

use crate::error::Result;
use crate::gateway::{CompletionRequest, CompletionResult, Gateway, PromptTemplates, Route, StageTag};
use std::collections::BTreeMap;

pub(crate) const REPROMPT_SUFFIX: &str =
    "\n\nYour previous reply could not be parsed. Respond with only the requested output format.";

/// Per-stage accumulation of backend latency and non-fatal warnings.
#[derive(Debug, Default)]
pub struct StageLog {
    pub latency_ms: u64,
    pub warnings: Vec<String>,
}

impl StageLog {
    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }
}

/// Gateway handle bound to one stage invocation.
pub struct LlmCall<'a> {
    pub gateway: &'a Gateway,
    pub templates: &'a PromptTemplates,
    pub route: Route,
    pub seed: u64,
}

impl<'a> LlmCall<'a> {
    fn request(&self, stage: StageTag, system: &str, user_prompt: String) -> CompletionRequest {
        let temperature = if stage == StageTag::Local { 0.3 } else { 0.0 };
        CompletionRequest {
            stage_tag: stage,
            system_prompt: system.to_string(),
            user_prompt,
            max_tokens: if stage == StageTag::Synthesize { 800 } else { 512 },
            temperature,
            seed: self.seed,
        }
    }

    pub fn complete(
        &self,
        stage: StageTag,
        system: &str,
        vars: &BTreeMap<&str, String>,
        log: &mut StageLog,
    ) -> Result<CompletionResult> {
        let prompt = self.templates.render(stage, vars);
        let result = self
            .gateway
            .complete(&self.request(stage, system, prompt), self.route)?;
        log.latency_ms += result.latency_ms;
        Ok(result)
    }

    /// Issue the stage prompt and parse it; on parse failure, reprompt once
    /// with a corrective suffix. Returns the parsed value or the raw text of
    /// the final attempt.
    pub fn complete_parsed<T>(
        &self,
        stage: StageTag,
        system: &str,
        vars: &BTreeMap<&str, String>,
        log: &mut StageLog,
        parse: impl Fn(&str) -> Option<T>,
    ) -> Result<std::result::Result<T, String>> {
        let prompt = self.templates.render(stage, vars);
        let first = self
            .gateway
            .complete(&self.request(stage, system, prompt.clone()), self.route)?;
        log.latency_ms += first.latency_ms;
        if let Some(parsed) = parse(&first.text) {
            return Ok(Ok(parsed));
        }
        log.warn(format!("{stage}: unparseable response, reprompting"));
        let retry = self.gateway.complete(
            &self.request(stage, system, format!("{prompt}{REPROMPT_SUFFIX}")),
            self.route,
        )?;
        log.latency_ms += retry.latency_ms;
        match parse(&retry.text) {
            Some(parsed) => Ok(Ok(parsed)),
            None => Ok(Err(retry.text)),
        }
    }
}
