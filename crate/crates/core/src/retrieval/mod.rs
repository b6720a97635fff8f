//! Corpus ingestion and lexical retrieval.
//!
//! A knowledge corpus (directory of `.txt` files or a `.jsonl` of
//! `{"id","text"}` records) is split into overlapping whitespace-token
//! chunks, indexed into an inverted BM25 index, and served at keypoint,
//! group, and option granularity. Chunk ids are `"doc:idx"`, dense and
//! deterministic given input order.

mod index;

pub use index::{retrieval_overlap, Hit, Index, RankedHits};

use crate::error::{Error, Result};
use crate::text::whitespace_tokens;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const INDEX_FORMAT_VERSION: &str = "grouprag-index-v1";

/// Sliding-window chunking parameters, counted in whitespace tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkingConfig {
    pub max_tokens: usize,
    pub overlap_tokens: usize,
}

impl Default for ChunkingConfig {
    fn default() -> Self {
        Self {
            max_tokens: 256,
            overlap_tokens: 32,
        }
    }
}

impl ChunkingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_tokens == 0 || self.overlap_tokens >= self.max_tokens {
            return Err(Error::input(format!(
                "invalid chunking config: require 0 <= overlap ({}) < max_tokens ({})",
                self.overlap_tokens, self.max_tokens
            )));
        }
        Ok(())
    }
}

/// One retrievable unit of corpus text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    /// Stable id `"doc_id:idx"`, unique within a corpus.
    pub id: String,
    pub doc_id: String,
    pub text: String,
    /// Whitespace-token count of `text`; always >= 1.
    pub token_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub chunks: Vec<Chunk>,
    pub chunking: ChunkingConfig,
}

/// Result of corpus ingestion, carrying non-fatal warnings.
#[derive(Debug)]
pub struct IngestReport {
    pub corpus: Corpus,
    pub skipped_docs: usize,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
struct JsonlDoc {
    id: String,
    text: String,
}

/// Split one document into overlapping chunks of at most `max_tokens`
/// whitespace tokens, stepping by `max_tokens - overlap_tokens`.
fn chunk_document(doc_id: &str, text: &str, cfg: ChunkingConfig) -> Vec<Chunk> {
    let tokens = whitespace_tokens(text);
    let mut chunks = Vec::new();
    if tokens.is_empty() {
        return chunks;
    }
    let stride = cfg.max_tokens - cfg.overlap_tokens;
    let mut start = 0usize;
    loop {
        let end = (start + cfg.max_tokens).min(tokens.len());
        let piece = tokens[start..end].join(" ");
        chunks.push(Chunk {
            id: format!("{}:{}", doc_id, chunks.len()),
            doc_id: doc_id.to_string(),
            token_count: end - start,
            text: piece,
        });
        if end == tokens.len() {
            break;
        }
        start += stride;
    }
    chunks
}

/// Ingest a corpus from a directory of `.txt` files or a single `.jsonl` file.
///
/// Documents with zero whitespace tokens are skipped and counted in the
/// report. Directory entries are processed in sorted filename order so ids
/// are stable across runs.
pub fn ingest_corpus(source: &Path, cfg: ChunkingConfig) -> Result<IngestReport> {
    cfg.validate()?;
    if !source.exists() {
        return Err(Error::input(format!(
            "corpus path does not exist: {}",
            source.display()
        )));
    }

    let mut docs: Vec<(String, String)> = Vec::new();
    if source.is_dir() {
        let mut paths: Vec<_> = std::fs::read_dir(source)?
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.is_file() && p.extension().map_or(false, |e| e == "txt"))
            .collect();
        paths.sort();
        for path in paths {
            let doc_id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("doc")
                .to_string();
            docs.push((doc_id, std::fs::read_to_string(&path)?));
        }
    } else if source.extension().map_or(false, |e| e == "jsonl") {
        let raw = std::fs::read_to_string(source)?;
        for (lineno, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let doc: JsonlDoc = serde_json::from_str(line).map_err(|e| {
                Error::input(format!(
                    "bad corpus record at {}:{}: {}",
                    source.display(),
                    lineno + 1,
                    e
                ))
            })?;
            docs.push((doc.id, doc.text));
        }
    } else {
        return Err(Error::input(format!(
            "corpus source must be a directory of .txt files or a .jsonl file: {}",
            source.display()
        )));
    }

    let mut seen = std::collections::BTreeSet::new();
    let mut chunks = Vec::new();
    let mut skipped = 0usize;
    let mut warnings = Vec::new();
    for (doc_id, text) in &docs {
        if !seen.insert(doc_id.clone()) {
            return Err(Error::input(format!("duplicate document id: {doc_id}")));
        }
        let doc_chunks = chunk_document(doc_id, text, cfg);
        if doc_chunks.is_empty() {
            skipped += 1;
            warnings.push(format!("document {doc_id} has no tokens, skipped"));
            continue;
        }
        chunks.extend(doc_chunks);
    }
    if docs.is_empty() {
        warnings.push("no documents found in corpus source".to_string());
    }

    Ok(IngestReport {
        corpus: Corpus {
            chunks,
            chunking: cfg,
        },
        skipped_docs: skipped,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn cfg(max: usize, overlap: usize) -> ChunkingConfig {
        ChunkingConfig {
            max_tokens: max,
            overlap_tokens: overlap,
        }
    }

    #[test]
    fn short_document_yields_single_chunk() {
        let text = (0..10).map(|i| format!("t{i}")).collect::<Vec<_>>().join(" ");
        let chunks = chunk_document("d", &text, cfg(50, 10));
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].id, "d:0");
        assert_eq!(chunks[0].token_count, 10);
    }

    #[test]
    fn sliding_window_overlaps_by_configured_amount() {
        // 100 tokens, window 60, overlap 10 -> tokens 0..59 and 50..99.
        let tokens: Vec<String> = (0..100).map(|i| format!("t{i}")).collect();
        let chunks = chunk_document("d", &tokens.join(" "), cfg(60, 10));
        assert_eq!(chunks.len(), 2);
        assert_eq!(chunks[0].token_count, 60);
        assert!(chunks[0].text.starts_with("t0 ") && chunks[0].text.ends_with(" t59"));
        assert_eq!(chunks[1].token_count, 50);
        assert!(chunks[1].text.starts_with("t50 ") && chunks[1].text.ends_with(" t99"));
    }

    #[test]
    fn ingest_empty_directory_warns() {
        let dir = tempfile::tempdir().unwrap();
        let report = ingest_corpus(dir.path(), ChunkingConfig::default()).unwrap();
        assert!(report.corpus.chunks.is_empty());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn ingest_skips_empty_documents() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.txt"), "alpha beta").unwrap();
        std::fs::write(dir.path().join("b.txt"), "   \n\t ").unwrap();
        let report = ingest_corpus(dir.path(), ChunkingConfig::default()).unwrap();
        assert_eq!(report.corpus.chunks.len(), 1);
        assert_eq!(report.skipped_docs, 1);
        assert_eq!(report.corpus.chunks[0].id, "a:0");
    }

    #[test]
    fn ingest_jsonl_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, r#"{{"id":"x","text":"one two three"}}"#).unwrap();
        writeln!(f, r#"{{"id":"y","text":"four five"}}"#).unwrap();
        let report = ingest_corpus(&path, ChunkingConfig::default()).unwrap();
        assert_eq!(report.corpus.chunks.len(), 2);
        assert_eq!(report.corpus.chunks[1].id, "y:0");
    }

    #[test]
    fn missing_path_is_input_error() {
        let err = ingest_corpus(Path::new("/nonexistent/xyz"), ChunkingConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn invalid_chunking_rejected() {
        let err = chunk_err(cfg(10, 10));
        assert!(matches!(err, Error::Input(_)));
    }

    fn chunk_err(c: ChunkingConfig) -> Error {
        let dir = tempfile::tempdir().unwrap();
        ingest_corpus(dir.path(), c).unwrap_err()
    }
}
