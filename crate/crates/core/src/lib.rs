//! grouprag-core: group-aware retrieval and reasoning over multiple-choice questions.
//!
//! The engine answers knowledge-dense questions in five stages: keypoint
//! extraction, knowledge-driven grouping, local reasoning per group, global
//! reasoning (conclusion selection + synthesis), and answer alignment.
//! Retrieval runs at three granularities (keypoint, group, option) against a
//! BM25 index built from a plain-text corpus. Conclusion selection can be
//! driven by a trainable Bernoulli policy optimized against the WIF reward
//! with group-relative policy gradients.
//!
//! Module map:
//! - [`retrieval`]: corpus ingestion, BM25 inverted index, ranked retrieval
//! - [`gateway`]: LLM completion interface (live HTTP or scripted mock)
//! - [`pipeline`]: the five reasoning stages and end-to-end orchestration
//! - [`policy`]: WIF reward, Bernoulli selection policy, policy-gradient trainer
//! - [`eval`]: stage-wise metrics (extraction PRF, BCubed, judge accuracy, WIF,
//!   answer accuracy)
//! - [`dataset`]: question JSONL loading

pub mod dataset;
pub mod error;
pub mod eval;
pub mod gateway;
pub mod pipeline;
pub mod policy;
pub mod retrieval;
pub mod text;

pub use error::{Error, Result};
