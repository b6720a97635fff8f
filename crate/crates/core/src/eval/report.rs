//! Per-run stage metrics and report rendering.

use super::bcubed::{bcubed, Partition};
use super::judge::judge_local;
use super::{extraction_prf, PrfScores, KEYPOINT_MATCH_THRESHOLD};
use crate::error::{Error, Result};
use crate::gateway::{Gateway, PromptTemplates};
use crate::pipeline::{PipelineTrace, Question};
use crate::policy::{wif_score, WifParams};
use crate::retrieval::Index;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Mean of a per-question metric with the number of questions it covers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricAverage {
    pub mean: f64,
    pub evaluated: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfAverage {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub evaluated: usize,
}

/// Stage-wise metrics for one run configuration. A `None` metric had no
/// evaluable questions (missing or mismatched gold annotations) and renders
/// as "n/a".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageMetrics {
    pub n_questions: usize,
    pub n_failed: usize,
    pub extract: Option<PrfAverage>,
    pub group: Option<PrfAverage>,
    pub local_accuracy: Option<MetricAverage>,
    pub global_wif: Option<MetricAverage>,
    pub answer_accuracy: Option<MetricAverage>,
    /// Conclusions whose judge call failed and was skipped.
    pub judge_skipped: usize,
}

/// Fraction of traces whose chosen option equals gold; failed traces count
/// as incorrect. Every trace must have a gold entry.
pub fn answer_accuracy(
    traces: &[PipelineTrace],
    golds: &BTreeMap<String, String>,
) -> Result<f64> {
    if traces.is_empty() {
        return Err(Error::input("answer accuracy over zero traces is undefined"));
    }
    let mut correct = 0usize;
    for trace in traces {
        let gold = golds.get(&trace.question_id).ok_or_else(|| {
            Error::input(format!("no gold option for question {}", trace.question_id))
        })?;
        let chosen = trace
            .aligned_answer
            .as_ref()
            .filter(|_| !trace.failed())
            .map(|a| a.chosen_option.as_str());
        if chosen == Some(gold.as_str()) {
            correct += 1;
        }
    }
    Ok(correct as f64 / traces.len() as f64)
}

/// Everything needed to run judge calls during evaluation.
pub struct JudgeContext<'a> {
    pub index: &'a Index,
    pub gateway: &'a Gateway,
    pub templates: &'a PromptTemplates,
    pub seed: u64,
}

fn groups_as_partition(trace: &PipelineTrace) -> Option<Partition> {
    let groups = trace.groups.as_ref()?;
    let mut assignments = BTreeMap::new();
    for g in groups {
        for idx in &g.keypoint_indices {
            assignments.insert(*idx, g.group_id);
        }
    }
    Some(Partition { assignments })
}

/// Compute all five stage metrics over one run's traces, averaging per
/// question. Questions lacking (or mismatching) a given gold annotation are
/// excluded from that metric's mean; evaluated counts are reported.
pub fn stage_report(
    traces: &[PipelineTrace],
    questions: &BTreeMap<String, Question>,
    judge: Option<&JudgeContext<'_>>,
    wif: &WifParams,
) -> Result<StageMetrics> {
    let mut ordered: Vec<&PipelineTrace> = traces.iter().collect();
    ordered.sort_by(|a, b| a.question_id.cmp(&b.question_id));

    let mut extract_sum = PrfScores::zero();
    let mut extract_n = 0usize;
    let mut group_sum = PrfScores::zero();
    let mut group_n = 0usize;
    let mut local_sum = 0.0f64;
    let mut local_n = 0usize;
    let mut wif_sum = 0.0f64;
    let mut wif_n = 0usize;
    let mut answer_correct = 0usize;
    let mut answer_n = 0usize;
    let mut n_failed = 0usize;
    let mut judge_skipped = 0usize;

    for trace in &ordered {
        let question = questions.get(&trace.question_id).ok_or_else(|| {
            Error::input(format!("trace {} has no dataset question", trace.question_id))
        })?;
        if trace.failed() {
            n_failed += 1;
        }
        let annotations = question.annotations.clone().unwrap_or_default();

        if let Some(gold_kps) = &annotations.keypoints {
            let predicted: Vec<String> = trace
                .keypoints
                .as_ref()
                .map(|kps| kps.iter().map(|k| k.text.clone()).collect())
                .unwrap_or_default();
            let scores = extraction_prf(&predicted, gold_kps, KEYPOINT_MATCH_THRESHOLD);
            extract_sum.precision += scores.precision;
            extract_sum.recall += scores.recall;
            extract_sum.f1 += scores.f1;
            extract_n += 1;
        }

        if let Some(gold_clusters) = &annotations.grouping {
            if let (Some(predicted), Ok(gold)) = (
                groups_as_partition(trace),
                Partition::from_clusters(gold_clusters),
            ) {
                // Universe mismatch (e.g. a different keypoint count) makes
                // the question unevaluable for this metric.
                if let Ok(scores) = bcubed(&predicted, &gold) {
                    group_sum.precision += scores.precision;
                    group_sum.recall += scores.recall;
                    group_sum.f1 += scores.f1;
                    group_n += 1;
                }
            }
        }

        if let (Some(ctx), Some(conclusions)) = (judge, trace.conclusions.as_ref()) {
            let mut correct = 0usize;
            let mut judged = 0usize;
            for c in conclusions {
                match judge_local(c, question, ctx.index, ctx.gateway, ctx.templates, ctx.seed) {
                    Ok(verdict) => {
                        judged += 1;
                        if verdict.correct {
                            correct += 1;
                        }
                    }
                    Err(_) => judge_skipped += 1,
                }
            }
            if judged > 0 {
                local_sum += correct as f64 / judged as f64;
                local_n += 1;
            }
        }

        if let Some(roles) = &annotations.roles {
            let selected: BTreeSet<usize> = trace
                .global_chain
                .as_ref()
                .map(|c| c.selected_conclusion_ids.clone())
                .unwrap_or_default();
            // A failed trace scores the empty selection: exactly 0.
            match wif_score(&selected, roles, wif) {
                Ok(score) => {
                    wif_sum += score;
                    wif_n += 1;
                }
                Err(_) => {} // selection universe mismatch: excluded
            }
        }

        if let Some(gold) = &question.gold_option {
            answer_n += 1;
            let chosen = trace
                .aligned_answer
                .as_ref()
                .filter(|_| !trace.failed())
                .map(|a| a.chosen_option.as_str());
            if chosen == Some(gold.as_str()) {
                answer_correct += 1;
            }
        }
    }

    let prf_avg = |sum: PrfScores, n: usize| {
        (n > 0).then(|| PrfAverage {
            precision: sum.precision / n as f64,
            recall: sum.recall / n as f64,
            f1: sum.f1 / n as f64,
            evaluated: n,
        })
    };
    let avg = |sum: f64, n: usize| {
        (n > 0).then(|| MetricAverage {
            mean: sum / n as f64,
            evaluated: n,
        })
    };

    Ok(StageMetrics {
        n_questions: ordered.len(),
        n_failed,
        extract: prf_avg(extract_sum, extract_n),
        group: prf_avg(group_sum, group_n),
        local_accuracy: avg(local_sum, local_n),
        global_wif: avg(wif_sum, wif_n),
        answer_accuracy: avg(answer_correct as f64, answer_n),
    judge_skipped,
    })
}

fn fmt_f1(value: Option<f64>) -> String {
    value.map_or("n/a".to_string(), |v| format!("{v:.3}"))
}

fn fmt_pct(value: Option<f64>) -> String {
    value.map_or("n/a".to_string(), |v| format!("{:.2}", v * 100.0))
}

fn fmt_wif(value: Option<f64>) -> String {
    value.map_or("n/a".to_string(), |v| format!("{v:.2}"))
}

/// Render rows of named metrics as a fixed-width text table. `deltas`, when
/// given, adds an answer-accuracy delta column (percentage points).
pub fn render_table(rows: &[(String, &StageMetrics)], deltas: Option<&[Option<f64>]>) -> String {
    let mut out = String::new();
    let with_delta = deltas.is_some();
    let name_width = rows
        .iter()
        .map(|(n, _)| n.len())
        .chain(std::iter::once("Variant".len()))
        .max()
        .unwrap_or(8);
    out.push_str(&format!(
        "{:<name_width$}  {:>10}  {:>8}  {:>12}  {:>10}  {:>13}",
        "Variant", "Extract F1", "Group F1", "Local Acc(%)", "Global WIF", "Answer Acc(%)"
    ));
    if with_delta {
        out.push_str(&format!("  {:>8}", "Delta(%)"));
    }
    out.push('\n');
    for (row_idx, (name, m)) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{:<name_width$}  {:>10}  {:>8}  {:>12}  {:>10}  {:>13}",
            name,
            fmt_f1(m.extract.map(|p| p.f1)),
            fmt_f1(m.group.map(|p| p.f1)),
            fmt_pct(m.local_accuracy.map(|a| a.mean)),
            fmt_wif(m.global_wif.map(|a| a.mean)),
            fmt_pct(m.answer_accuracy.map(|a| a.mean)),
        ));
        if let Some(deltas) = deltas {
            let cell = deltas
                .get(row_idx)
                .copied()
                .flatten()
                .map_or(String::new(), |d| format!("{:+.2}", d * 100.0));
            out.push_str(&format!("  {cell:>8}"));
        }
        out.push('\n');
    }
    out
}
