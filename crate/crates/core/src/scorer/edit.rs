//! Lexical baseline: maximum normalized edit similarity over label pairs.

use super::{Answer, PairInput, PairScorer, ScorerError, Verdict};
use crate::ontology::normalize_label;

/// Levenshtein distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            cur[j + 1] = substitution.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 − lev(a, b) / max(|a|, |b|)`; two empty strings are identical.
pub fn normalized_edit_similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

/// Maximum normalized edit similarity over all pairs of normalized labels.
pub fn edit_similarity<S: AsRef<str>, T: AsRef<str>>(
    source_labels: &[S],
    target_labels: &[T],
) -> Result<f64, ScorerError> {
    if source_labels.is_empty() {
        return Err(ScorerError::EmptyLabels("source"));
    }
    if target_labels.is_empty() {
        return Err(ScorerError::EmptyLabels("target"));
    }
    let targets: Vec<String> = target_labels.iter().map(|t| normalize_label(t.as_ref())).collect();
    let mut best = 0.0f64;
    for s in source_labels {
        let s = normalize_label(s.as_ref());
        for t in &targets {
            best = best.max(normalized_edit_similarity(&s, t));
        }
    }
    Ok(best)
}

/// Yes iff the similarity reaches `threshold`; the similarity is reported as
/// the Yes probability and its complement as the No probability.
pub fn edit_similarity_classify<S: AsRef<str>, T: AsRef<str>>(
    source_labels: &[S],
    target_labels: &[T],
    threshold: f64,
) -> Result<Verdict, ScorerError> {
    let sim = edit_similarity(source_labels, target_labels)?;
    let answer = if sim >= threshold { Answer::Yes } else { Answer::No };
    Verdict::with_answer(answer, sim, 1.0 - sim)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EditSimilarityScorer {
    pub threshold: f64,
}

impl EditSimilarityScorer {
    /// Threshold commonly used for this baseline.
    pub const DEFAULT_THRESHOLD: f64 = 0.900;

    pub fn new(threshold: f64) -> Self {
        Self { threshold }
    }
}

impl Default for EditSimilarityScorer {
    fn default() -> Self {
        Self::new(Self::DEFAULT_THRESHOLD)
    }
}

impl PairScorer for EditSimilarityScorer {
    fn scorer_id(&self) -> String {
        format!("edit-similarity@{:.6}", self.threshold)
    }

    fn key_material(&self, pair: &PairInput<'_>) -> String {
        serde_json::to_string(&(&pair.source_view.names, &pair.target_view.names))
            .expect("label lists serialize")
    }

    fn classify(&self, pair: &PairInput<'_>) -> Result<Verdict, ScorerError> {
        edit_similarity_classify(&pair.source_view.names, &pair.target_view.names, self.threshold)
    }
}
