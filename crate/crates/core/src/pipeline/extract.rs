//! Keypoint extraction stage.

use super::stage::{LlmCall, StageLog};
use super::types::{Keypoint, Question};
use super::parse::parse_string_array;
use crate::error::{Error, Result};
use crate::gateway::StageTag;
use std::collections::BTreeMap;

const SYSTEM: &str = "You identify the key information points inside a question.";

/// Extract keypoints from the question stem. Duplicate strings
/// (case-insensitive) are dropped, keeping the first occurrence; an empty
/// list after parsing is a stage error because every downstream stage needs
/// at least one keypoint.
pub fn extract_keypoints(
    question: &Question,
    call: &LlmCall<'_>,
    log: &mut StageLog,
) -> Result<Vec<Keypoint>> {
    let mut vars = BTreeMap::new();
    vars.insert("question", question.stem.clone());
    let parsed = call.complete_parsed(StageTag::Extract, SYSTEM, &vars, log, parse_string_array)?;
    let strings = parsed.map_err(|raw| {
        Error::stage(
            StageTag::Extract,
            format!("response is not a JSON array of strings: {raw:?}"),
        )
    })?;

    let mut seen = std::collections::BTreeSet::new();
    let mut keypoints = Vec::new();
    for text in strings {
        let trimmed = text.trim().to_string();
        if trimmed.is_empty() {
            continue;
        }
        if !seen.insert(trimmed.to_lowercase()) {
            continue;
        }
        let source_span = question
            .stem
            .to_lowercase()
            .find(&trimmed.to_lowercase())
            .map(|start| (start, start + trimmed.len()));
        keypoints.push(Keypoint {
            index: keypoints.len(),
            text: trimmed,
            source_span,
        });
    }
    if keypoints.is_empty() {
        return Err(Error::stage(StageTag::Extract, "no keypoints extracted"));
    }
    Ok(keypoints)
}
