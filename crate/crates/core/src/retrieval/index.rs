//! BM25 inverted index and ranked retrieval.

use super::{Chunk, ChunkingConfig, Corpus, INDEX_FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::text::tokenize;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

const BM25_K1: f64 = 1.2;
const BM25_B: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Posting {
    chunk: usize,
    tf: u32,
}

/// Immutable retrieval index. Safe to share across threads once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    chunks: Vec<Chunk>,
    chunking: ChunkingConfig,
    /// term -> postings sorted by chunk position.
    postings: BTreeMap<String, Vec<Posting>>,
    /// BM25 document lengths (index-token counts, not whitespace tokens).
    lengths: Vec<usize>,
    avg_len: f64,
}

/// One scored retrieval hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub chunk_id: String,
    pub score: f64,
}

/// Ranked retrieval result: scores non-increasing, ties broken by ascending
/// chunk id, at most `k` entries, positive scores only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedHits {
    pub query: String,
    pub k: usize,
    pub entries: Vec<Hit>,
}

impl RankedHits {
    pub fn empty(query: impl Into<String>, k: usize) -> Self {
        Self {
            query: query.into(),
            k,
            entries: Vec::new(),
        }
    }

    pub fn ids(&self) -> std::collections::BTreeSet<&str> {
        self.entries.iter().map(|h| h.chunk_id.as_str()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Build the inverted index for a corpus. An empty corpus yields an index
/// where every query returns no hits.
pub fn build_index(corpus: &Corpus) -> Index {
    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut lengths = Vec::with_capacity(corpus.chunks.len());
    for (pos, chunk) in corpus.chunks.iter().enumerate() {
        let tokens = tokenize(&chunk.text);
        lengths.push(tokens.len());
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for t in tokens {
            *tf.entry(t).or_insert(0) += 1;
        }
        for (term, count) in tf {
            postings.entry(term).or_default().push(Posting {
                chunk: pos,
                tf: count,
            });
        }
    }
    let avg_len = if lengths.is_empty() {
        0.0
    } else {
        lengths.iter().sum::<usize>() as f64 / lengths.len() as f64
    };
    Index {
        chunks: corpus.chunks.clone(),
        chunking: corpus.chunking,
        postings,
        lengths,
        avg_len,
    }
}

impl Index {
    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn vocab_size(&self) -> usize {
        self.postings.len()
    }

    pub fn chunking(&self) -> ChunkingConfig {
        self.chunking
    }

    pub fn chunks(&self) -> &[Chunk] {
        &self.chunks
    }

    pub fn chunk_by_id(&self, id: &str) -> Option<&Chunk> {
        // Corpora here are small; a linear scan keeps the struct lean.
        self.chunks.iter().find(|c| c.id == id)
    }

    /// Top-`k` chunks by BM25 score (k1=1.2, b=0.75). Only chunks with
    /// positive score are returned; ties break by ascending chunk id.
    pub fn retrieve(&self, query: &str, k: usize) -> Result<RankedHits> {
        if k == 0 {
            return Err(Error::input("retrieve requires k >= 1"));
        }
        let terms = tokenize(query);
        if terms.is_empty() {
            return Err(Error::input(format!(
                "query is empty after normalization: {query:?}"
            )));
        }
        let mut scores: Vec<f64> = vec![0.0; self.chunks.len()];
        let n = self.chunks.len() as f64;
        for term in &terms {
            let Some(postings) = self.postings.get(term) else {
                continue;
            };
            let df = postings.len() as f64;
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            for p in postings {
                let tf = p.tf as f64;
                let dl = self.lengths[p.chunk] as f64;
                let norm = tf * (BM25_K1 + 1.0)
                    / (tf + BM25_K1 * (1.0 - BM25_B + BM25_B * dl / self.avg_len));
                scores[p.chunk] += idf * norm;
            }
        }
        let mut ranked: Vec<(usize, f64)> = scores
            .into_iter()
            .enumerate()
            .filter(|(_, s)| *s > 0.0)
            .collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| self.chunks[a.0].id.cmp(&self.chunks[b.0].id))
        });
        ranked.truncate(k);
        Ok(RankedHits {
            query: query.to_string(),
            k,
            entries: ranked
                .into_iter()
                .map(|(pos, score)| Hit {
                    chunk_id: self.chunks[pos].id.clone(),
                    score,
                })
                .collect(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = IndexFile {
            version: INDEX_FORMAT_VERSION.to_string(),
            chunking: self.chunking,
            chunks: self.chunks.clone(),
        };
        let mut out = serde_json::to_string_pretty(&file)?;
        out.push('\n');
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Index> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read index {}: {e}", path.display())))?;
        let file: IndexFile = serde_json::from_str(&raw)
            .map_err(|e| Error::input(format!("malformed index file {}: {e}", path.display())))?;
        if file.version != INDEX_FORMAT_VERSION {
            return Err(Error::input(format!(
                "unsupported index version {:?} (expected {:?})",
                file.version, INDEX_FORMAT_VERSION
            )));
        }
        Ok(build_index(&Corpus {
            chunks: file.chunks,
            chunking: file.chunking,
        }))
    }
}

/// On-disk index representation. Postings are rebuilt on load; building is
/// deterministic so the loaded index is structurally identical to the saved
/// one.
#[derive(Serialize, Deserialize)]
struct IndexFile {
    version: String,
    chunking: ChunkingConfig,
    chunks: Vec<Chunk>,
}

/// Jaccard similarity of two hit lists' chunk-id sets. Both empty yields 0.
pub fn retrieval_overlap(a: &RankedHits, b: &RankedHits) -> f64 {
    let sa = a.ids();
    let sb = b.ids();
    if sa.is_empty() && sb.is_empty() {
        return 0.0;
    }
    let inter = sa.intersection(&sb).count();
    let union = sa.union(&sb).count();
    inter as f64 / union as f64
}
