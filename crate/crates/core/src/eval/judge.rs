//! Judge-based correctness checks for local conclusions.

use crate::error::Result;
use crate::gateway::{CompletionRequest, Gateway, PromptTemplates, Route, StageTag};
use crate::pipeline::{LocalConclusion, Question};
use crate::policy::RoleLabels;
use crate::retrieval::Index;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JudgeVerdict {
    pub correct: bool,
    /// True when the judge response carried no recognizable verdict token.
    pub flagged: bool,
}

fn parse_verdict(text: &str) -> JudgeVerdict {
    // INCORRECT must be checked first since it contains CORRECT.
    if text.contains("INCORRECT") {
        JudgeVerdict {
            correct: false,
            flagged: false,
        }
    } else if text.contains("CORRECT") {
        JudgeVerdict {
            correct: true,
            flagged: false,
        }
    } else {
        JudgeVerdict {
            correct: false,
            flagged: true,
        }
    }
}

/// Ask the judge backend whether a conclusion is factually and logically
/// sound. Backend failures propagate so callers can skip and record them.
pub fn judge_local(
    conclusion: &LocalConclusion,
    question: &Question,
    index: &Index,
    gateway: &Gateway,
    templates: &PromptTemplates,
    seed: u64,
) -> Result<JudgeVerdict> {
    let evidence = if conclusion.cited_chunk_ids.is_empty() {
        "(no cited evidence)".to_string()
    } else {
        conclusion
            .cited_chunk_ids
            .iter()
            .map(|id| {
                let text = index.chunk_by_id(id).map(|c| c.text.as_str()).unwrap_or("(missing)");
                format!("[{id}] {text}")
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut vars = BTreeMap::new();
    vars.insert("question", question.stem.clone());
    vars.insert("conclusions", conclusion.text.clone());
    vars.insert("evidence", evidence);
    let request = CompletionRequest {
        stage_tag: StageTag::Judge,
        system_prompt: "You are a strict reviewer of clinical reasoning.".to_string(),
        user_prompt: templates.render(StageTag::Judge, &vars),
        max_tokens: 64,
        temperature: 0.0,
        seed,
    };
    let result = gateway.complete(&request, Route::Trained)?;
    Ok(parse_verdict(&result.text))
}

/// Derive Core/Support/Noise labels for conclusions lacking gold roles.
///
/// Heuristic, not a ground-truth protocol: a conclusion judged correct with
/// citations is Core, judged correct without citations is Support, judged
/// incorrect is Noise.
pub fn derive_role_labels(
    conclusions: &[LocalConclusion],
    question: &Question,
    index: &Index,
    gateway: &Gateway,
    templates: &PromptTemplates,
    seed: u64,
) -> Result<RoleLabels> {
    let mut labels = RoleLabels::default();
    for c in conclusions {
        let verdict = judge_local(c, question, index, gateway, templates, seed)?;
        if verdict.correct && !c.cited_chunk_ids.is_empty() {
            labels.core.insert(c.group_id);
        } else if verdict.correct {
            labels.support.insert(c.group_id);
        } else {
            labels.noise.insert(c.group_id);
        }
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_tokens() {
        assert!(parse_verdict("CORRECT").correct);
        assert!(!parse_verdict("CORRECT").flagged);
        let v = parse_verdict("INCORRECT -- contradicts evidence");
        assert!(!v.correct && !v.flagged);
        let v = parse_verdict("it depends on context");
        assert!(!v.correct && v.flagged);
        // "CORRECT" embedded after reasoning still counts.
        assert!(parse_verdict("The claim holds. CORRECT").correct);
    }
}
