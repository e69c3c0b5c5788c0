use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::vocab::{SubwordVocab, UNK_TOKEN};
use crate::ontology::{normalize_label, ConceptIri, Ontology};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("token {0:?} does not occur in the index")]
    UnknownToken(String),
    #[error("invalid index file: {0}")]
    Invalid(String),
    #[error("malformed index file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Inverse document frequency, `ln(doc_count / df)`.
///
/// Every idf computation in the crate goes through here.
pub fn idf_weight(doc_count: usize, df: usize) -> f64 {
    (doc_count as f64 / df as f64).ln()
}

/// Distinct sub-word tokens of a set of labels, `<unk>` excluded.
pub fn label_tokens<S: AsRef<str>>(vocab: &SubwordVocab, labels: &[S]) -> BTreeSet<String> {
    labels
        .iter()
        .flat_map(|l| vocab.tokenize(&normalize_label(l.as_ref())))
        .filter(|t| t != UNK_TOKEN)
        .collect()
}

/// Sub-word token → concepts containing it. One document per concept; a
/// concept's tokens are the union over all of its normalized labels.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    vocab: SubwordVocab,
    postings: BTreeMap<String, BTreeSet<ConceptIri>>,
    documents: BTreeSet<ConceptIri>,
}

impl InvertedIndex {
    pub fn build(ontology: &Ontology, vocab: &SubwordVocab) -> Self {
        let mut postings: BTreeMap<String, BTreeSet<ConceptIri>> = BTreeMap::new();
        for concept in ontology.concepts() {
            for token in label_tokens(vocab, concept.labels()) {
                postings
                    .entry(token)
                    .or_default()
                    .insert(concept.iri().clone());
            }
        }
        Self {
            vocab: vocab.clone(),
            postings,
            documents: ontology.iris().cloned().collect(),
        }
    }

    pub fn vocab(&self) -> &SubwordVocab {
        &self.vocab
    }

    pub fn doc_count(&self) -> usize {
        self.documents.len()
    }

    pub fn documents(&self) -> &BTreeSet<ConceptIri> {
        &self.documents
    }

    pub fn postings(&self) -> &BTreeMap<String, BTreeSet<ConceptIri>> {
        &self.postings
    }

    pub fn df(&self, token: &str) -> Option<usize> {
        self.postings.get(token).map(BTreeSet::len)
    }

    pub fn idf(&self, token: &str) -> Result<f64, IndexError> {
        let df = self
            .df(token)
            .ok_or_else(|| IndexError::UnknownToken(token.to_owned()))?;
        Ok(idf_weight(self.doc_count(), df))
    }

    /// Scores every indexed concept against the query labels and returns the
    /// best `k`.
    ///
    /// A concept's score is the sum of idf over the distinct query tokens it
    /// contains. Excluded and zero-score concepts are dropped; ties are broken
    /// by IRI.
    pub fn top_k_candidates<S: AsRef<str>>(
        &self,
        query_labels: &[S],
        k: usize,
        excluded: &BTreeSet<ConceptIri>,
    ) -> Vec<(ConceptIri, f64)> {
        let query = label_tokens(&self.vocab, query_labels);
        let mut scores: BTreeMap<&ConceptIri, f64> = BTreeMap::new();
        // BTreeSet order keeps the per-document summation order fixed
        for token in &query {
            let Some(posting) = self.postings.get(token) else {
                continue;
            };
            let weight = idf_weight(self.doc_count(), posting.len());
            for doc in posting {
                *scores.entry(doc).or_insert(0.0) += weight;
            }
        }
        let mut ranked: Vec<(ConceptIri, f64)> = scores
            .into_iter()
            .filter(|(iri, score)| *score > 0.0 && !excluded.contains(*iri))
            .map(|(iri, score)| (iri.clone(), score))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(k);
        ranked
    }

    pub fn to_json(&self) -> Vec<u8> {
        let file = IndexFile {
            continuation_prefix: self.vocab.continuation_prefix().to_owned(),
            vocab: self.vocab.entries(),
            doc_count: self.doc_count(),
            documents: self.documents.iter().cloned().collect(),
            postings: self
                .postings
                .iter()
                .map(|(t, docs)| (t.clone(), docs.iter().cloned().collect()))
                .collect(),
        };
        serde_json::to_vec(&file).expect("index serialization is infallible")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, IndexError> {
        let file: IndexFile = serde_json::from_slice(bytes)?;
        let documents: BTreeSet<ConceptIri> = file.documents.into_iter().collect();
        if documents.len() != file.doc_count {
            return Err(IndexError::Invalid(format!(
                "doc_count {} but {} distinct documents",
                file.doc_count,
                documents.len()
            )));
        }
        let mut postings = BTreeMap::new();
        for (token, docs) in file.postings {
            if docs.is_empty() {
                return Err(IndexError::Invalid(format!("empty posting list for {token:?}")));
            }
            if let Some(stray) = docs.iter().find(|d| !documents.contains(*d)) {
                return Err(IndexError::Invalid(format!(
                    "posting list for {token:?} names unindexed concept {stray}"
                )));
            }
            postings.insert(token, docs.into_iter().collect());
        }
        Ok(Self {
            vocab: SubwordVocab::new(file.vocab, &file.continuation_prefix),
            postings,
            documents,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    continuation_prefix: String,
    vocab: Vec<String>,
    doc_count: usize,
    documents: Vec<ConceptIri>,
    postings: BTreeMap<String, Vec<ConceptIri>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::Concept;

    fn iri(s: &str) -> ConceptIri {
        ConceptIri::new(s).unwrap()
    }

    fn onto(items: &[(&str, &[&str])]) -> Ontology {
        Ontology::from_concepts(items.iter().map(|(i, labels)| {
            Concept::new(iri(i), labels.iter().map(|s| s.to_string()), vec![]).unwrap()
        }))
    }

    #[test]
    fn empty_ontology() {
        let ix = InvertedIndex::build(&Ontology::default(), &SubwordVocab::builtin());
        assert_eq!(ix.doc_count(), 0);
        assert!(ix.postings().is_empty());
    }

    #[test]
    fn single_concept() {
        let v = SubwordVocab::new(["pain"], "##");
        let ix = InvertedIndex::build(&onto(&[("p", &["pain"])]), &v);
        assert_eq!(ix.doc_count(), 1);
        assert_eq!(ix.postings().len(), 1);
        assert_eq!(ix.postings()["pain"], [iri("p")].into());
    }

    #[test]
    fn unk_is_never_indexed() {
        let v = SubwordVocab::new(["pain"], "##");
        let ix = InvertedIndex::build(&onto(&[("p", &["pain zzz"])]), &v);
        assert!(!ix.postings().contains_key(UNK_TOKEN));
        assert_eq!(ix.postings().len(), 1);
    }

    #[test]
    fn idf_values() {
        assert!((idf_weight(4, 2) - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(idf_weight(7, 7), 0.0);
        assert!((idf_weight(1000, 1) - 6.907_755_278_982_137).abs() < 1e-12);

        let v = SubwordVocab::new(["a", "b"], "##");
        let ix = InvertedIndex::build(&onto(&[("1", &["a b"]), ("2", &["a"])]), &v);
        assert_eq!(ix.idf("a").unwrap(), 0.0);
        assert!((ix.idf("b").unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(ix.idf("zz"), Err(IndexError::UnknownToken(_))));
    }

    #[test]
    fn shared_token_score_difference_is_idf() {
        let v = SubwordVocab::new(["alpha", "beta", "gamma"], "##");
        let ix = InvertedIndex::build(
            &onto(&[
                ("d1", &["alpha beta"]),
                ("d2", &["alpha"]),
                ("d3", &["gamma"]),
                ("d4", &["gamma"]),
            ]),
            &v,
        );
        let got = ix.top_k_candidates(&["alpha beta"], 10, &BTreeSet::new());
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].0, iri("d1"));
        assert_eq!(got[1].0, iri("d2"));
        assert!((got[0].1 - got[1].1 - ix.idf("beta").unwrap()).abs() < 1e-12);
    }

    #[test]
    fn no_overlap_gives_nothing() {
        let v = SubwordVocab::new(["alpha", "gamma"], "##");
        let ix = InvertedIndex::build(&onto(&[("d", &["gamma"]), ("e", &["alpha"])]), &v);
        assert!(ix.top_k_candidates(&["zzz"], 5, &BTreeSet::new()).is_empty());
        // matches on the query's own token set, not on shared characters
        assert_eq!(ix.top_k_candidates(&["alpha"], 5, &BTreeSet::new()).len(), 1);
    }

    #[test]
    fn exclusions_and_truncation() {
        let v = SubwordVocab::new(["x", "y"], "##");
        let ix = InvertedIndex::build(
            &onto(&[("a", &["x"]), ("b", &["x"]), ("c", &["x"]), ("d", &["y"])]),
            &v,
        );
        let got = ix.top_k_candidates(&["x"], 2, &[iri("a")].into());
        let iris: Vec<_> = got.iter().map(|(i, _)| i.as_str()).collect();
        assert_eq!(iris, ["b", "c"]);
        assert!(ix.top_k_candidates(&["x"], 0, &BTreeSet::new()).is_empty());
    }

    #[test]
    fn json_round_trip() {
        let ix = InvertedIndex::build(
            &onto(&[("a", &["heart valve"]), ("b", &["cardiac muscle"])]),
            &SubwordVocab::builtin(),
        );
        let back = InvertedIndex::from_json(&ix.to_json()).unwrap();
        assert_eq!(back, ix);
    }

    #[test]
    fn corrupt_index_file_rejected() {
        let bad = br###"{"continuation_prefix":"##","vocab":["a"],"doc_count":1,"documents":["x"],"postings":{"a":["y"]}}"###;
        assert!(matches!(InvertedIndex::from_json(bad), Err(IndexError::Invalid(_))));
    }
}
