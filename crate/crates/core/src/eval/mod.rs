//! Ranking, thresholding and metrics over scored candidate pairs.

mod report;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::CandidateSet;
use crate::ontology::ConceptIri;
use crate::scorer::{Answer, Verdict};

pub use report::{build_report, read_scored_run, write_scored_run, EvalReport, ReportSettings};

pub type Pair = (ConceptIri, ConceptIri);

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("reference alignment is empty; metrics are undefined")]
    EmptyReference,
    #[error("no unmatched candidate sets; rejection rate is undefined")]
    NoUnmatchedSets,
    #[error("verdict for ({concept}, {target}) has no probabilities and cannot be ranked")]
    RankingIneligible { concept: ConceptIri, target: ConceptIri },
    #[error("ranked list mixes sources {first} and {other}")]
    MixedSources { first: ConceptIri, other: ConceptIri },
    #[error("ground truth {target} missing from the ranked list of {concept}")]
    GroundTruthMissing { concept: ConceptIri, target: ConceptIri },
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("scored run misses {} subset pair(s), first ({}, {})", .0.len(), .0[0].0, .0[0].1)]
    Coverage(Vec<Pair>),
    #[error("pair ({}, {}) scored more than once", .0.0, .0.1)]
    Duplicate(Pair),
    #[error("pair ({}, {}) is not part of the subset", .0.0, .0.1)]
    Extra(Pair),
    #[error("scored run line {line}: {message}")]
    Jsonl { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredMapping {
    pub source: ConceptIri,
    pub target: ConceptIri,
    pub verdict: Verdict,
}

impl ScoredMapping {
    pub fn new(source: ConceptIri, target: ConceptIri, verdict: Verdict) -> Self {
        Self {
            source,
            target,
            verdict,
        }
    }
}

fn rank_order(a: &ScoredMapping, b: &ScoredMapping) -> Ordering {
    let (va, vb) = (&a.verdict, &b.verdict);
    let by_score = match (va.answer, vb.answer) {
        (Answer::Yes, Answer::No) => Ordering::Less,
        (Answer::No, Answer::Yes) => Ordering::Greater,
        (Answer::Yes, Answer::Yes) => vb.yes_prob.unwrap().total_cmp(&va.yes_prob.unwrap()),
        (Answer::No, Answer::No) => va.no_prob.unwrap().total_cmp(&vb.no_prob.unwrap()),
    };
    by_score.then_with(|| a.target.cmp(&b.target))
}

/// Orders one source's candidates: Yes answers by descending Yes probability,
/// then No answers by ascending No probability, ties by target IRI.
pub fn rank_candidates(ms: &[ScoredMapping]) -> Result<Vec<ScoredMapping>, EvalError> {
    if let Some(first) = ms.first() {
        for m in ms {
            if m.source != first.source {
                return Err(EvalError::MixedSources {
                    first: first.source.clone(),
                    other: m.source.clone(),
                });
            }
            if !m.verdict.has_probabilities() {
                return Err(EvalError::RankingIneligible {
                    concept: m.source.clone(),
                    target: m.target.clone(),
                });
            }
        }
    }
    let mut ranked = ms.to_vec();
    ranked.sort_by(rank_order);
    Ok(ranked)
}

/// Pairs answered Yes whose Yes probability reaches `tau`. Probability-free
/// Yes answers are kept only at `tau == 0`.
pub fn apply_threshold<'a>(
    ms: impl IntoIterator<Item = &'a ScoredMapping>,
    tau: f64,
) -> BTreeSet<Pair> {
    ms.into_iter()
        .filter(|m| {
            m.verdict.is_yes()
                && match m.verdict.yes_prob {
                    Some(p) => p >= tau,
                    None => tau == 0.0,
                }
        })
        .map(|m| (m.source.clone(), m.target.clone()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
}

pub fn prf_metrics(pred: &BTreeSet<Pair>, reference: &BTreeSet<Pair>) -> Result<Prf, EvalError> {
    if reference.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    let tp = pred.intersection(reference).count();
    let precision = if pred.is_empty() {
        0.0
    } else {
        tp as f64 / pred.len() as f64
    };
    let recall = tp as f64 / reference.len() as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Prf {
        precision,
        recall,
        f1,
        true_positives: tp,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankingMetrics {
    pub hits_at_k: f64,
    pub mrr: f64,
}

/// Hits@K and MRR over the reference pairs, with 1-based ranks.
pub fn ranking_metrics(
    ranked: &BTreeMap<ConceptIri, Vec<ConceptIri>>,
    reference: &BTreeSet<Pair>,
    k: usize,
) -> Result<RankingMetrics, EvalError> {
    if reference.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    let mut hits = 0usize;
    let mut reciprocal_sum = 0.0;
    for (source, target) in reference {
        let missing = || EvalError::GroundTruthMissing {
            concept: source.clone(),
            target: target.clone(),
        };
        let list = ranked.get(source).ok_or_else(missing)?;
        let rank = list.iter().position(|t| t == target).ok_or_else(missing)? + 1;
        if rank <= k {
            hits += 1;
        }
        reciprocal_sum += 1.0 / rank as f64;
    }
    let n = reference.len() as f64;
    Ok(RankingMetrics {
        hits_at_k: hits as f64 / n,
        mrr: reciprocal_sum / n,
    })
}

/// Share of unmatched sources none of whose candidates is predicted true.
pub fn rejection_rate(pred: &BTreeSet<Pair>, unmatched_sets: &[CandidateSet]) -> Result<f64, EvalError> {
    if unmatched_sets.is_empty() {
        return Err(EvalError::NoUnmatchedSets);
    }
    let rejected = unmatched_sets
        .iter()
        .filter(|set| {
            set.candidates
                .iter()
                .all(|t| !pred.contains(&(set.source.clone(), t.clone())))
        })
        .count();
    Ok(rejected as f64 / unmatched_sets.len() as f64)
}
