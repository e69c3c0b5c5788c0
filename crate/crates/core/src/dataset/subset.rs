use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use super::{derive_seed, seeded_rng, DatasetError, ReferenceAlignment, ReferenceMappings};
use crate::ontology::{ConceptIri, Ontology};
use crate::retrieval::InvertedIndex;

/// Candidate targets scored against one source concept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub source: ConceptIri,
    pub ground_truth: Option<ConceptIri>,
    pub candidates: Vec<ConceptIri>,
}

impl CandidateSet {
    fn check(&self, size: usize) -> Result<(), String> {
        if self.candidates.len() != size {
            return Err(format!(
                "{} has {} candidates, expected {size}",
                self.source,
                self.candidates.len()
            ));
        }
        let distinct: BTreeSet<_> = self.candidates.iter().collect();
        if distinct.len() != self.candidates.len() {
            return Err(format!("{} has duplicate candidates", self.source));
        }
        if let Some(gt) = &self.ground_truth {
            if !distinct.contains(gt) {
                return Err(format!("{} does not contain its ground truth {gt}", self.source));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetParams {
    pub n_matched: usize,
    pub n_unmatched: usize,
    pub candidate_size: usize,
    pub seed: u64,
}

impl Default for SubsetParams {
    fn default() -> Self {
        Self {
            n_matched: 50,
            n_unmatched: 50,
            candidate_size: 100,
            seed: 0,
        }
    }
}

/// Matched sets (ground truth present) and unmatched sets (absent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSubset {
    pub matched_sets: Vec<CandidateSet>,
    pub unmatched_sets: Vec<CandidateSet>,
    pub seed: u64,
}

impl TaskSubset {
    pub fn sets(&self) -> impl Iterator<Item = &CandidateSet> {
        self.matched_sets.iter().chain(&self.unmatched_sets)
    }

    pub fn total_pairs(&self) -> usize {
        self.sets().map(|s| s.candidates.len()).sum()
    }

    /// Every (source, candidate) pair in file order.
    pub fn pairs(&self) -> impl Iterator<Item = (&ConceptIri, &ConceptIri)> {
        self.sets()
            .flat_map(|s| s.candidates.iter().map(move |c| (&s.source, c)))
    }

    pub fn reference(&self) -> ReferenceAlignment {
        ReferenceAlignment {
            matched: self
                .matched_sets
                .iter()
                .filter_map(|s| Some((s.source.clone(), s.ground_truth.clone()?)))
                .collect(),
            unmatched_sources: self.unmatched_sets.iter().map(|s| s.source.clone()).collect(),
        }
    }

    /// Structural invariants: uniform set size, distinct candidates, ground
    /// truth contained exactly where expected, each source used once.
    pub fn validate(&self) -> Result<(), DatasetError> {
        let size = self.sets().next().map_or(0, |s| s.candidates.len());
        let mut sources = BTreeSet::new();
        for set in &self.matched_sets {
            if set.ground_truth.is_none() {
                return Err(DatasetError::Invariant(format!(
                    "matched set {} has no ground truth",
                    set.source
                )));
            }
        }
        for set in &self.unmatched_sets {
            if set.ground_truth.is_some() {
                return Err(DatasetError::Invariant(format!(
                    "unmatched set {} has a ground truth",
                    set.source
                )));
            }
        }
        for set in self.sets() {
            set.check(size).map_err(DatasetError::Invariant)?;
            if !sources.insert(&set.source) {
                return Err(DatasetError::Invariant(format!(
                    "source {} appears twice",
                    set.source
                )));
            }
        }
        Ok(())
    }

    /// JSON Lines, one candidate set per line, matched sets first.
    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for set in self.sets() {
            serde_json::to_writer(&mut out, set).expect("candidate set serialization is infallible");
            out.push(b'\n');
        }
        out
    }

    pub fn from_jsonl(bytes: &[u8], seed: u64) -> Result<Self, DatasetError> {
        let text = std::str::from_utf8(bytes).map_err(|e| DatasetError::Jsonl {
            line: 0,
            message: e.to_string(),
        })?;
        let mut subset = Self {
            matched_sets: Vec::new(),
            unmatched_sets: Vec::new(),
            seed,
        };
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let set: CandidateSet = serde_json::from_str(line).map_err(|e| DatasetError::Jsonl {
                line: i + 1,
                message: e.to_string(),
            })?;
            if set.ground_truth.is_some() {
                subset.matched_sets.push(set);
            } else {
                subset.unmatched_sets.push(set);
            }
        }
        subset.validate()?;
        Ok(subset)
    }
}

fn resolve<'o>(
    onto: &'o Ontology,
    iri: &ConceptIri,
    side: &'static str,
) -> Result<&'o crate::ontology::Concept, DatasetError> {
    onto.get(iri).ok_or_else(|| DatasetError::UnknownConcept {
        side,
        iri: iri.clone(),
    })
}

/// Keeps the pairs whose normalized label sets are disjoint, i.e. those that
/// direct string matching cannot align.
pub fn filter_string_matched<'a>(
    pairs: impl IntoIterator<Item = (&'a ConceptIri, &'a ConceptIri)>,
    source: &Ontology,
    target: &Ontology,
) -> Result<BTreeSet<(ConceptIri, ConceptIri)>, DatasetError> {
    let mut kept = BTreeSet::new();
    for (src, tgt) in pairs {
        let s = resolve(source, src, "source")?.normalized_labels();
        let t = resolve(target, tgt, "target")?.normalized_labels();
        if s.is_disjoint(&t) {
            kept.insert((src.clone(), tgt.clone()));
        }
    }
    Ok(kept)
}

/// Samples `n` distinct sources uniformly without replacement, then one of
/// each source's targets. Result is sorted by source.
pub fn sample_matched_sources(
    filtered: &BTreeSet<(ConceptIri, ConceptIri)>,
    n: usize,
    seed: u64,
) -> Result<Vec<(ConceptIri, ConceptIri)>, DatasetError> {
    let mut by_source: BTreeMap<&ConceptIri, Vec<&ConceptIri>> = BTreeMap::new();
    for (s, t) in filtered {
        by_source.entry(s).or_default().push(t);
    }
    if by_source.len() < n {
        return Err(DatasetError::InsufficientMatched {
            requested: n,
            available: by_source.len(),
            pairs: filtered.len(),
        });
    }
    let sources: Vec<(&ConceptIri, Vec<&ConceptIri>)> = by_source.into_iter().collect();
    let mut rng = seeded_rng(seed);
    let mut picked: Vec<(ConceptIri, ConceptIri)> = index::sample(&mut rng, sources.len(), n)
        .into_iter()
        .map(|i| {
            let (src, targets) = &sources[i];
            let tgt = targets.choose(&mut rng).expect("grouped sources have targets");
            ((*src).clone(), (*tgt).clone())
        })
        .collect();
    picked.sort();
    Ok(picked)
}

/// Samples `n` source concepts that have no match anywhere in the reference.
pub fn sample_unmatched_sources(
    source: &Ontology,
    reference: &ReferenceMappings,
    n: usize,
    seed: u64,
) -> Result<Vec<ConceptIri>, DatasetError> {
    let pool: Vec<&ConceptIri> = source
        .iris()
        .filter(|iri| !reference.is_matched_source(iri))
        .collect();
    if pool.len() < n {
        return Err(DatasetError::InsufficientUnmatched {
            requested: n,
            available: pool.len(),
        });
    }
    let mut rng = seeded_rng(seed);
    let mut picked: Vec<ConceptIri> = index::sample(&mut rng, pool.len(), n)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect();
    picked.sort();
    Ok(picked)
}

/// Builds candidate sets from the target-side idf index.
pub struct CandidateBuilder<'a> {
    pub source: &'a Ontology,
    pub reference: &'a ReferenceMappings,
    pub index: &'a InvertedIndex,
}

impl CandidateBuilder<'_> {
    /// Negatives are the idf top-k for the source's labels, skipping every
    /// reference target of the source; a short list is topped up with
    /// eligible targets in IRI order. The ground truth, when given, is added
    /// and the whole list is shuffled with `shuffle_seed`.
    pub fn build(
        &self,
        source: &ConceptIri,
        ground_truth: Option<&ConceptIri>,
        size: usize,
        shuffle_seed: u64,
    ) -> Result<CandidateSet, DatasetError> {
        if size == 0 {
            return Err(DatasetError::InvalidSize {
                size,
                reason: "must be at least 1",
            });
        }
        if ground_truth.is_some() && size < 2 {
            return Err(DatasetError::InvalidSize {
                size,
                reason: "must be at least 2 when a ground truth is included",
            });
        }
        let concept = resolve(self.source, source, "source")?;
        let mut excluded: BTreeSet<ConceptIri> = self
            .reference
            .targets_of(source)
            .cloned()
            .unwrap_or_default();
        excluded.extend(ground_truth.cloned());

        let k = size - usize::from(ground_truth.is_some());
        let mut negatives: Vec<ConceptIri> = self
            .index
            .top_k_candidates(concept.labels(), k, &excluded)
            .into_iter()
            .map(|(iri, _)| iri)
            .collect();
        if negatives.len() < k {
            let taken: BTreeSet<ConceptIri> = negatives.iter().cloned().collect();
            let fill: Vec<ConceptIri> = self
                .index
                .documents()
                .iter()
                .filter(|d| !excluded.contains(*d) && !taken.contains(*d))
                .take(k - negatives.len())
                .cloned()
                .collect();
            negatives.extend(fill);
        }
        if negatives.len() < k {
            return Err(DatasetError::TargetTooSmall {
                concept: source.clone(),
                size,
                available: negatives.len() + usize::from(ground_truth.is_some()),
            });
        }

        let mut candidates = negatives;
        candidates.extend(ground_truth.cloned());
        candidates.shuffle(&mut seeded_rng(shuffle_seed));
        Ok(CandidateSet {
            source: source.clone(),
            ground_truth: ground_truth.cloned(),
            candidates,
        })
    }
}

/// Filter → sample matched → sample unmatched → one candidate set per source.
pub fn assemble_subset(
    source: &Ontology,
    target: &Ontology,
    reference: &ReferenceMappings,
    index: &InvertedIndex,
    params: &SubsetParams,
) -> Result<(TaskSubset, ReferenceAlignment), DatasetError> {
    let filtered = filter_string_matched(reference.pairs(), source, target)?;
    let matched = sample_matched_sources(&filtered, params.n_matched, params.seed)?;
    let unmatched = sample_unmatched_sources(
        source,
        reference,
        params.n_unmatched,
        derive_seed(params.seed, "unmatched-sources"),
    )?;

    let builder = CandidateBuilder {
        source,
        reference,
        index,
    };
    let shuffle_seed = |iri: &ConceptIri| derive_seed(params.seed, &format!("candidates:{iri}"));
    let matched_sets = matched
        .iter()
        .map(|(src, tgt)| builder.build(src, Some(tgt), params.candidate_size, shuffle_seed(src)))
        .collect::<Result<Vec<_>, _>>()?;
    let unmatched_sets = unmatched
        .iter()
        .map(|src| builder.build(src, None, params.candidate_size, shuffle_seed(src)))
        .collect::<Result<Vec<_>, _>>()?;

    let subset = TaskSubset {
        matched_sets,
        unmatched_sets,
        seed: params.seed,
    };
    subset.validate()?;
    for set in &subset.matched_sets {
        let gt = set.ground_truth.as_ref().expect("validated");
        let s = resolve(source, &set.source, "source")?.normalized_labels();
        let t = resolve(target, gt, "target")?.normalized_labels();
        if !s.is_disjoint(&t) {
            return Err(DatasetError::Invariant(format!(
                "matched pair ({}, {gt}) shares a label",
                set.source
            )));
        }
        if set
            .candidates
            .iter()
            .any(|c| c != gt && reference.contains(&set.source, c))
        {
            return Err(DatasetError::Invariant(format!(
                "negatives of {} include a reference match",
                set.source
            )));
        }
    }
    let alignment = subset.reference();
    Ok((subset, alignment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::Concept;
    use crate::retrieval::SubwordVocab;

    fn iri(s: &str) -> ConceptIri {
        ConceptIri::new(s).unwrap()
    }

    fn onto(items: &[(&str, &[&str])]) -> Ontology {
        Ontology::from_concepts(items.iter().map(|(i, labels)| {
            Concept::new(iri(i), labels.iter().map(|s| s.to_string()), vec![]).unwrap()
        }))
    }

    fn pairs(items: &[(&str, &str)]) -> BTreeSet<(ConceptIri, ConceptIri)> {
        items.iter().map(|(a, b)| (iri(a), iri(b))).collect()
    }

    #[test]
    fn string_match_filter() {
        let src = onto(&[
            ("s1", &["myocardium"]),
            ("s2", &["Myocardium"]),
            ("s3", &["cardiac muscle"]),
        ]);
        let tgt = onto(&[("t1", &["myocardium", "heart muscle"]), ("t2", &["myocardium"])]);
        let ps = pairs(&[("s1", "t1"), ("s2", "t2"), ("s3", "t2")]);
        let kept = filter_string_matched(ps.iter().map(|(a, b)| (a, b)), &src, &tgt).unwrap();
        assert_eq!(kept, pairs(&[("s3", "t2")]));
    }

    #[test]
    fn filter_unknown_iri_named() {
        let src = onto(&[("s1", &["a"])]);
        let tgt = onto(&[("t1", &["b"])]);
        let ps = pairs(&[("s1", "t9")]);
        let err = filter_string_matched(ps.iter().map(|(a, b)| (a, b)), &src, &tgt).unwrap_err();
        assert!(err.to_string().contains("t9"));
    }

    #[test]
    fn sample_all_and_determinism() {
        let ps = pairs(&[("a", "1"), ("b", "2"), ("c", "3")]);
        let all = sample_matched_sources(&ps, 3, 7).unwrap();
        assert_eq!(all.into_iter().collect::<BTreeSet<_>>(), ps);
        assert_eq!(
            sample_matched_sources(&ps, 2, 11).unwrap(),
            sample_matched_sources(&ps, 2, 11).unwrap()
        );
    }

    #[test]
    fn sampling_varies_with_seed() {
        let ps: BTreeSet<_> = (0..20)
            .map(|i| (iri(&format!("s{i:02}")), iri(&format!("t{i:02}"))))
            .collect();
        let differs = (0..100u64).any(|k| {
            sample_matched_sources(&ps, 5, 2 * k).unwrap()
                != sample_matched_sources(&ps, 5, 2 * k + 1).unwrap()
        });
        assert!(differs);
    }

    #[test]
    fn one_target_per_source() {
        let ps = pairs(&[("a", "1"), ("a", "2"), ("b", "3")]);
        let got = sample_matched_sources(&ps, 2, 3).unwrap();
        assert_eq!(got.len(), 2);
        assert_ne!(got[0].0, got[1].0);
        let err = sample_matched_sources(&ps, 3, 3).unwrap_err();
        assert!(matches!(
            err,
            DatasetError::InsufficientMatched {
                requested: 3,
                available: 2,
                pairs: 3
            }
        ));
    }

    #[test]
    fn unmatched_sampling() {
        let src = onto(&[("a", &["a"]), ("b", &["b"]), ("c", &["c"])]);
        let all_matched = ReferenceMappings::from_pairs(
            ["a", "b", "c"].iter().map(|s| (iri(s), iri("t"))),
        );
        assert!(matches!(
            sample_unmatched_sources(&src, &all_matched, 1, 0),
            Err(DatasetError::InsufficientUnmatched { .. })
        ));
        let one = ReferenceMappings::from_pairs([(iri("a"), iri("t"))]);
        assert_eq!(
            sample_unmatched_sources(&src, &one, 2, 5).unwrap(),
            vec![iri("b"), iri("c")]
        );
    }

    fn builder_fixture() -> (Ontology, Ontology, ReferenceMappings) {
        let src = onto(&[("s", &["heart valve"]), ("u", &["kidney"])]);
        let tgt = onto(&[
            ("t0", &["cardiac valve"]),
            ("t1", &["heart"]),
            ("t2", &["valve"]),
            ("t3", &["heart valve disease"]),
            ("t4", &["lung"]),
            ("t5", &["liver"]),
        ]);
        let reference = ReferenceMappings::from_pairs([(iri("s"), iri("t0")), (iri("s"), iri("t3"))]);
        (src, tgt, reference)
    }

    #[test]
    fn candidate_set_with_ground_truth() {
        let (src, tgt, reference) = builder_fixture();
        let ix = InvertedIndex::build(&tgt, &SubwordVocab::builtin());
        let b = CandidateBuilder {
            source: &src,
            reference: &reference,
            index: &ix,
        };
        let set = b.build(&iri("s"), Some(&iri("t0")), 4, 1).unwrap();
        assert_eq!(set.candidates.len(), 4);
        assert!(set.candidates.contains(&iri("t0")));
        // t3 is another reference match of s and must never be a negative
        assert!(!set.candidates.contains(&iri("t3")));
        let distinct: BTreeSet<_> = set.candidates.iter().collect();
        assert_eq!(distinct.len(), 4);
    }

    #[test]
    fn size_one_is_top_scored() {
        let (src, tgt, reference) = builder_fixture();
        let ix = InvertedIndex::build(&tgt, &SubwordVocab::builtin());
        let b = CandidateBuilder {
            source: &src,
            reference: &ReferenceMappings::default(),
            index: &ix,
        };
        let labels = src.get(&iri("s")).unwrap().labels();
        let best = ix.top_k_candidates(labels, 1, &BTreeSet::new())[0].0.clone();
        let set = b.build(&iri("s"), None, 1, 99).unwrap();
        assert_eq!(set.candidates, vec![best]);
        let _ = reference;
    }

    #[test]
    fn shortfall_topped_up_in_iri_order() {
        let (src, tgt, reference) = builder_fixture();
        let ix = InvertedIndex::build(&tgt, &SubwordVocab::new(["kidney", "heart"], "##"));
        let b = CandidateBuilder {
            source: &src,
            reference: &reference,
            index: &ix,
        };
        // nothing in the target shares a token with "kidney"
        let set = b.build(&iri("u"), None, 3, 0).unwrap();
        let got: BTreeSet<_> = set.candidates.into_iter().collect();
        assert_eq!(got, [iri("t0"), iri("t1"), iri("t2")].into());
    }

    #[test]
    fn size_errors() {
        let (src, tgt, reference) = builder_fixture();
        let ix = InvertedIndex::build(&tgt, &SubwordVocab::builtin());
        let b = CandidateBuilder {
            source: &src,
            reference: &reference,
            index: &ix,
        };
        assert!(matches!(
            b.build(&iri("s"), None, 0, 0),
            Err(DatasetError::InvalidSize { .. })
        ));
        assert!(matches!(
            b.build(&iri("s"), Some(&iri("t0")), 1, 0),
            Err(DatasetError::InvalidSize { .. })
        ));
        // 6 targets, t3 excluded: at most 5 candidates for s
        assert!(matches!(
            b.build(&iri("s"), Some(&iri("t0")), 6, 0),
            Err(DatasetError::TargetTooSmall { available: 5, .. })
        ));
    }

    #[test]
    fn jsonl_round_trip() {
        let subset = TaskSubset {
            matched_sets: vec![CandidateSet {
                source: iri("s"),
                ground_truth: Some(iri("b")),
                candidates: vec![iri("a"), iri("b")],
            }],
            unmatched_sets: vec![CandidateSet {
                source: iri("u"),
                ground_truth: None,
                candidates: vec![iri("c"), iri("a")],
            }],
            seed: 4,
        };
        let text = subset.to_jsonl();
        assert_eq!(
            String::from_utf8(text.clone()).unwrap(),
            "{\"source\":\"s\",\"ground_truth\":\"b\",\"candidates\":[\"a\",\"b\"]}\n\
             {\"source\":\"u\",\"ground_truth\":null,\"candidates\":[\"c\",\"a\"]}\n"
        );
        assert_eq!(TaskSubset::from_jsonl(&text, 4).unwrap(), subset);
    }

    #[test]
    fn jsonl_rejects_broken_sets() {
        let missing_gt = b"{\"source\":\"s\",\"ground_truth\":\"z\",\"candidates\":[\"a\",\"b\"]}\n";
        assert!(matches!(
            TaskSubset::from_jsonl(missing_gt, 0),
            Err(DatasetError::Invariant(_))
        ));
        let ragged = b"{\"source\":\"s\",\"ground_truth\":null,\"candidates\":[\"a\",\"b\"]}\n{\"source\":\"t\",\"ground_truth\":null,\"candidates\":[\"a\"]}\n";
        assert!(matches!(
            TaskSubset::from_jsonl(ragged, 0),
            Err(DatasetError::Invariant(_))
        ));
        assert!(matches!(
            TaskSubset::from_jsonl(b"{\"source\":1}\n", 0),
            Err(DatasetError::Jsonl { line: 1, .. })
        ));
    }
}
