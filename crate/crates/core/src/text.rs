//! Text normalization shared by retrieval, grouping, and evaluation.
//!
//! Tokenization is deliberately simple: lowercase, split on non-alphanumeric,
//! no stemming. This keeps brute-force scoring oracles exact.

use std::collections::BTreeMap;

/// Lowercase a string and split it on non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Whitespace tokens, used for chunk windows (distinct from index tokens).
pub fn whitespace_tokens(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// Token-level F1 between two strings over token multisets.
///
/// Returns 1.0 when both token lists are empty and 0.0 when exactly one is.
pub fn token_f1(a: &str, b: &str) -> f64 {
    let ta = tokenize(a);
    let tb = tokenize(b);
    if ta.is_empty() && tb.is_empty() {
        return 1.0;
    }
    if ta.is_empty() || tb.is_empty() {
        return 0.0;
    }
    let mut counts: BTreeMap<&str, isize> = BTreeMap::new();
    for t in &ta {
        *counts.entry(t.as_str()).or_insert(0) += 1;
    }
    let mut overlap = 0usize;
    for t in &tb {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    2.0 * overlap as f64 / (ta.len() + tb.len()) as f64
}

/// Jaccard similarity over token sets. Empty/empty yields 0.
pub fn jaccard_tokens(a: &str, b: &str) -> f64 {
    let sa: std::collections::BTreeSet<String> = tokenize(a).into_iter().collect();
    let sb: std::collections::BTreeSet<String> = tokenize(b).into_iter().collect();
    if sa.is_empty() && sb.is_empty() {
        return 0.0;
    }
    let inter = sa.intersection(&sb).count();
    let union = sa.union(&sb).count();
    inter as f64 / union as f64
}

/// Minimal English stopword list used when picking query terms from chains.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "been", "but", "by", "can", "do", "for", "from",
    "had", "has", "have", "how", "if", "in", "is", "it", "its", "no", "not", "of", "on", "or",
    "so", "that", "the", "this", "to", "up", "was", "were", "what", "when", "where", "which",
    "will", "with",
];

fn is_stopword(token: &str) -> bool {
    STOPWORDS.contains(&token)
}

/// The `n` highest-frequency non-stopword tokens of `text`.
///
/// Ties break by first occurrence so the result is deterministic.
pub fn top_terms(text: &str, n: usize) -> Vec<String> {
    let tokens = tokenize(text);
    let mut freq: BTreeMap<&str, (usize, usize)> = BTreeMap::new(); // token -> (count, first pos)
    for (pos, t) in tokens.iter().enumerate() {
        if is_stopword(t) {
            continue;
        }
        let e = freq.entry(t.as_str()).or_insert((0, pos));
        e.0 += 1;
    }
    let mut ranked: Vec<(&str, usize, usize)> =
        freq.into_iter().map(|(t, (c, p))| (t, c, p)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    ranked.into_iter().take(n).map(|(t, _, _)| t.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_lowercases_and_splits() {
        assert_eq!(
            tokenize("Fever, productive-cough!"),
            vec!["fever", "productive", "cough"]
        );
        assert!(tokenize("??? ...").is_empty());
    }

    #[test]
    fn token_f1_partial_overlap() {
        // "cough" vs "productive cough": overlap 1, lengths 1 and 2.
        let f1 = token_f1("cough", "productive cough");
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(token_f1("", ""), 1.0);
        assert_eq!(token_f1("fever", ""), 0.0);
    }

    #[test]
    fn top_terms_ranks_by_frequency_then_position() {
        let terms = top_terms("iron iron deficiency anemia with the iron panel", 2);
        assert_eq!(terms, vec!["iron", "deficiency"]);
    }
}
