//! Prompt templates, one per stage.
//!
//! Templates are plain text files with `{{name}}` placeholders. The bundled
//! defaults live under `templates/` in this crate and can be overridden by a
//! directory containing files named after stage tags (`extract.txt`, ...).

use super::StageTag;
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

const PLACEHOLDERS: &[&str] = &[
    "question",
    "keypoints",
    "group",
    "evidence",
    "conclusions",
    "chain",
    "options",
];

/// Substitute `{{key}}` placeholders. Keys absent from `vars` render empty.
pub fn render_template(template: &str, vars: &BTreeMap<&str, String>) -> String {
    let mut out = template.to_string();
    for key in PLACEHOLDERS {
        let slot = format!("{{{{{key}}}}}");
        let value = vars.get(key).map(String::as_str).unwrap_or("");
        out = out.replace(&slot, value);
    }
    out
}

#[derive(Debug, Clone)]
pub struct PromptTemplates {
    by_stage: BTreeMap<StageTag, String>,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        Self::bundled()
    }
}

impl PromptTemplates {
    /// The templates shipped with the crate.
    pub fn bundled() -> Self {
        let mut by_stage = BTreeMap::new();
        by_stage.insert(
            StageTag::Extract,
            include_str!("../../templates/extract.txt").to_string(),
        );
        by_stage.insert(
            StageTag::Group,
            include_str!("../../templates/group.txt").to_string(),
        );
        by_stage.insert(
            StageTag::Local,
            include_str!("../../templates/local.txt").to_string(),
        );
        by_stage.insert(
            StageTag::Select,
            include_str!("../../templates/select.txt").to_string(),
        );
        by_stage.insert(
            StageTag::Synthesize,
            include_str!("../../templates/synthesize.txt").to_string(),
        );
        by_stage.insert(
            StageTag::Align,
            include_str!("../../templates/align.txt").to_string(),
        );
        by_stage.insert(
            StageTag::Judge,
            include_str!("../../templates/judge.txt").to_string(),
        );
        Self { by_stage }
    }

    /// Bundled templates with per-stage overrides read from `dir`.
    pub fn load_overrides(dir: &Path) -> Result<Self> {
        let mut templates = Self::bundled();
        if !dir.is_dir() {
            return Err(Error::input(format!(
                "prompt template directory not found: {}",
                dir.display()
            )));
        }
        for stage in StageTag::ALL {
            let path = dir.join(format!("{}.txt", stage.name()));
            if path.is_file() {
                templates.by_stage.insert(stage, std::fs::read_to_string(&path)?);
            }
        }
        Ok(templates)
    }

    pub fn get(&self, stage: StageTag) -> &str {
        // Every stage is populated by construction.
        &self.by_stage[&stage]
    }

    pub fn render(&self, stage: StageTag, vars: &BTreeMap<&str, String>) -> String {
        render_template(self.get(stage), vars)
    }
}
