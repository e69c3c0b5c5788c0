//! Shared helpers and brute-force oracles for the integration tests.
//!
//! Every oracle here is written independently of the library code it checks:
//! no shared helpers, plain loops, full matrices.

#![allow(dead_code)]

pub mod stub;

use std::collections::BTreeSet;

use ontalign::dataset::{CandidateSet, TaskSubset};
use ontalign::eval::ScoredMapping;
use ontalign::ontology::Ontology;
use ontalign::retrieval::SubwordVocab;
use ontalign::scorer::{Answer, Verdict};
use ontalign::ConceptIri;
use rand::Rng;

pub fn iri(s: &str) -> ConceptIri {
    ConceptIri::new(s).unwrap()
}

/// Full-matrix Levenshtein distance over chars.
pub fn dp_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

pub fn dp_similarity(a: &str, b: &str) -> f64 {
    let m = a.chars().count().max(b.chars().count());
    if m == 0 {
        1.0
    } else {
        1.0 - dp_levenshtein(a, b) as f64 / m as f64
    }
}

/// True when `a` must be ranked strictly before `b` by score alone.
pub fn beats(a: &Verdict, b: &Verdict) -> bool {
    match (a.answer, b.answer) {
        (Answer::Yes, Answer::No) => true,
        (Answer::No, Answer::Yes) => false,
        (Answer::Yes, Answer::Yes) => a.yes_prob.unwrap() > b.yes_prob.unwrap(),
        (Answer::No, Answer::No) => a.no_prob.unwrap() < b.no_prob.unwrap(),
    }
}

/// Selection sort using the pairwise precedence rule with IRI tie-break.
pub fn brute_force_rank(ms: &[ScoredMapping]) -> Vec<ConceptIri> {
    let mut left: Vec<&ScoredMapping> = ms.iter().collect();
    let mut out = Vec::new();
    while !left.is_empty() {
        let mut best = 0;
        for i in 1..left.len() {
            let (c, b) = (left[i], left[best]);
            let tie = !beats(&c.verdict, &b.verdict) && !beats(&b.verdict, &c.verdict);
            if beats(&c.verdict, &b.verdict) || (tie && c.target < b.target) {
                best = i;
            }
        }
        out.push(left.remove(best).target.clone());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub hits_at_1: Option<f64>,
    pub mrr: Option<f64>,
    pub rejection_rate: Option<f64>,
    pub n_pred: usize,
    pub tp: usize,
}

fn predicted(m: &ScoredMapping, tau: f64) -> bool {
    m.verdict.answer == Answer::Yes
        && match m.verdict.yes_prob {
            Some(p) => p >= tau,
            None => tau == 0.0,
        }
}

/// Recomputes every metric straight from the raw verdicts.
pub fn oracle_report(subset: &TaskSubset, run: &[ScoredMapping], tau: f64) -> OracleReport {
    let find = |s: &ConceptIri, t: &ConceptIri| run.iter().find(|m| &m.source == s && &m.target == t).unwrap();
    let gt_pairs: Vec<(ConceptIri, ConceptIri)> = subset
        .matched_sets
        .iter()
        .map(|s| (s.source.clone(), s.ground_truth.clone().unwrap()))
        .collect();

    let mut n_pred = 0;
    let mut tp = 0;
    for m in run {
        if predicted(m, tau) {
            n_pred += 1;
            if gt_pairs.iter().any(|(s, t)| s == &m.source && t == &m.target) {
                tp += 1;
            }
        }
    }
    let precision = if n_pred == 0 { 0.0 } else { tp as f64 / n_pred as f64 };
    let recall = tp as f64 / gt_pairs.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };

    let rankable = subset
        .matched_sets
        .iter()
        .all(|set| set.candidates.iter().all(|t| find(&set.source, t).verdict.yes_prob.is_some()));
    let (hits_at_1, mrr) = if rankable {
        let mut hits = 0usize;
        let mut recip = 0.0;
        let mut sorted_gt = gt_pairs.clone();
        sorted_gt.sort();
        for (s, g) in &sorted_gt {
            let set = subset.matched_sets.iter().find(|x| &x.source == s).unwrap();
            let gv = find(s, g);
            let mut rank = 1;
            for t in &set.candidates {
                if t == g {
                    continue;
                }
                let c = find(s, t);
                let tie = !beats(&c.verdict, &gv.verdict) && !beats(&gv.verdict, &c.verdict);
                if beats(&c.verdict, &gv.verdict) || (tie && t < g) {
                    rank += 1;
                }
            }
            if rank == 1 {
                hits += 1;
            }
            recip += 1.0 / rank as f64;
        }
        let n = sorted_gt.len() as f64;
        (Some(hits as f64 / n), Some(recip / n))
    } else {
        (None, None)
    };

    let rejection_rate = if subset.unmatched_sets.is_empty() {
        None
    } else {
        let rejected = subset
            .unmatched_sets
            .iter()
            .filter(|set| set.candidates.iter().all(|t| !predicted(find(&set.source, t), tau)))
            .count();
        Some(rejected as f64 / subset.unmatched_sets.len() as f64)
    };
    OracleReport {
        precision,
        recall,
        f1,
        hits_at_1,
        mrr,
        rejection_rate,
        n_pred,
        tp,
    }
}

/// A verdict drawn from a coarse grid so that ties are frequent.
pub fn random_verdict(rng: &mut impl Rng, text_only_rate: f64) -> Verdict {
    if rng.gen_bool(text_only_rate) {
        let answer = if rng.gen_bool(0.5) { Answer::Yes } else { Answer::No };
        return Verdict::text_only(answer);
    }
    let yes = rng.gen_range(0..=20) as f64 / 20.0;
    let no = rng.gen_range(0..=20 - (yes * 20.0).round() as u32) as f64 / 20.0;
    Verdict::from_probabilities(yes, no).unwrap()
}

/// Random subset with `n_sources ≤ 20` sources and `≤ 20` candidates each,
/// plus a verdict for every pair.
pub fn random_run(rng: &mut impl Rng, text_only_rate: f64) -> (TaskSubset, Vec<ScoredMapping>) {
    let n_matched = rng.gen_range(1..=10);
    let n_unmatched = rng.gen_range(0..=10);
    let n_candidates = rng.gen_range(1..=20);
    let pool: Vec<ConceptIri> = (0..40).map(|i| iri(&format!("t{i:02}"))).collect();
    let make = |src: String, matched: bool, rng: &mut dyn rand::RngCore| {
        let mut idx: Vec<usize> = (0..pool.len()).collect();
        use rand::seq::SliceRandom;
        idx.shuffle(rng);
        let candidates: Vec<ConceptIri> = idx[..n_candidates].iter().map(|&i| pool[i].clone()).collect();
        CandidateSet {
            source: iri(&src),
            ground_truth: matched.then(|| candidates[rng.gen_range(0..n_candidates)].clone()),
            candidates,
        }
    };
    let matched_sets: Vec<CandidateSet> = (0..n_matched).map(|i| make(format!("m{i:02}"), true, rng)).collect();
    let unmatched_sets: Vec<CandidateSet> = (0..n_unmatched).map(|i| make(format!("u{i:02}"), false, rng)).collect();
    let subset = TaskSubset {
        matched_sets,
        unmatched_sets,
        seed: 0,
    };
    let run = subset
        .pairs()
        .map(|(s, t)| ScoredMapping::new(s.clone(), t.clone(), random_verdict(rng, text_only_rate)))
        .collect();
    (subset, run)
}

/// Scores every target concept by scanning the whole ontology.
pub fn brute_force_top_k(
    target: &Ontology,
    vocab: &SubwordVocab,
    query_labels: &[String],
    k: usize,
    excluded: &BTreeSet<ConceptIri>,
) -> Vec<(ConceptIri, f64)> {
    let tokens_of = |labels: &[String]| -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        for l in labels {
            let norm = l.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
            for t in vocab.tokenize(&norm) {
                if t != "<unk>" {
                    set.insert(t);
                }
            }
        }
        set
    };
    let docs: Vec<(ConceptIri, BTreeSet<String>)> = target
        .concepts()
        .map(|c| (c.iri().clone(), tokens_of(c.labels())))
        .collect();
    let n = docs.len() as f64;
    let query = tokens_of(query_labels);
    let mut scored = Vec::new();
    for (doc_iri, doc_tokens) in &docs {
        if excluded.contains(doc_iri) {
            continue;
        }
        let mut score = 0.0;
        for t in &query {
            if doc_tokens.contains(t) {
                let df = docs.iter().filter(|(_, d)| d.contains(t)).count() as f64;
                score += (n / df).ln();
            }
        }
        if score > 0.0 {
            scored.push((doc_iri.clone(), score));
        }
    }
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scored.truncate(k);
    scored
}
