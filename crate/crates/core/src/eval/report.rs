use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::{
    apply_threshold, prf_metrics, rank_candidates, ranking_metrics, rejection_rate, EvalError, Pair,
    ScoredMapping,
};
use crate::dataset::{ReferenceAlignment, TaskSubset};
use crate::ontology::ConceptIri;
use crate::scorer::{Answer, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub threshold: f64,
    pub with_hierarchy: bool,
    pub scorer_id: String,
    pub seed: u64,
}

/// Metrics for one scored run. Ranking fields are `None` when some matched
/// candidate has no probabilities; `rejection_rate` is `None` when the subset
/// has no unmatched sources.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub hits_at_1: Option<f64>,
    pub mrr: Option<f64>,
    pub rejection_rate: Option<f64>,
    pub n_predicted: usize,
    pub n_reference: usize,
    pub n_unreferenced: usize,
    pub true_positives: usize,
    pub settings: ReportSettings,
}

fn fixed(x: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{x:.6}")).expect("decimal literal is valid JSON")
}

#[derive(Serialize)]
struct CountsJson {
    predicted: usize,
    reference: usize,
    unreferenced: usize,
    true_positives: usize,
}

#[derive(Serialize)]
struct SettingsJson<'a> {
    threshold: Box<RawValue>,
    with_hierarchy: bool,
    scorer_id: &'a str,
    seed: u64,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    precision: Box<RawValue>,
    recall: Box<RawValue>,
    f1: Box<RawValue>,
    hits_at_1: Option<Box<RawValue>>,
    mrr: Option<Box<RawValue>>,
    rejection_rate: Option<Box<RawValue>>,
    counts: CountsJson,
    settings: SettingsJson<'a>,
}

impl EvalReport {
    /// Pretty JSON with every number written with six decimals.
    pub fn to_json(&self) -> String {
        let doc = ReportJson {
            precision: fixed(self.precision),
            recall: fixed(self.recall),
            f1: fixed(self.f1),
            hits_at_1: self.hits_at_1.map(fixed),
            mrr: self.mrr.map(fixed),
            rejection_rate: self.rejection_rate.map(fixed),
            counts: CountsJson {
                predicted: self.n_predicted,
                reference: self.n_reference,
                unreferenced: self.n_unreferenced,
                true_positives: self.true_positives,
            },
            settings: SettingsJson {
                threshold: fixed(self.settings.threshold),
                with_hierarchy: self.settings.with_hierarchy,
                scorer_id: &self.settings.scorer_id,
                seed: self.settings.seed,
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Computes the full report for a scored run over `subset`.
///
/// Every subset pair must be scored exactly once and no other pairs may
/// appear.
pub fn build_report(
    subset: &TaskSubset,
    reference: &ReferenceAlignment,
    ms: &[ScoredMapping],
    settings: ReportSettings,
) -> Result<EvalReport, EvalError> {
    let tau = settings.threshold;
    if !(0.0..=1.0).contains(&tau) {
        return Err(EvalError::InvalidThreshold(tau));
    }
    let mut by_pair: HashMap<(&ConceptIri, &ConceptIri), &ScoredMapping> = HashMap::with_capacity(ms.len());
    for m in ms {
        if by_pair.insert((&m.source, &m.target), m).is_some() {
            return Err(EvalError::Duplicate((m.source.clone(), m.target.clone())));
        }
    }
    let expected: BTreeSet<(&ConceptIri, &ConceptIri)> = subset.pairs().collect();
    let missing: Vec<Pair> = expected
        .iter()
        .filter(|p| !by_pair.contains_key(*p))
        .map(|(s, t)| ((*s).clone(), (*t).clone()))
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::Coverage(missing));
    }
    if let Some(m) = ms.iter().find(|m| !expected.contains(&(&m.source, &m.target))) {
        return Err(EvalError::Extra((m.source.clone(), m.target.clone())));
    }

    let pred = apply_threshold(ms, tau);
    let prf = prf_metrics(&pred, &reference.matched)?;

    let ranking_eligible = subset.matched_sets.iter().all(|set| {
        set.candidates
            .iter()
            .all(|t| by_pair[&(&set.source, t)].verdict.has_probabilities())
    });
    let ranking = if ranking_eligible {
        let mut ranked = BTreeMap::new();
        for set in &subset.matched_sets {
            let entries: Vec<ScoredMapping> = set
                .candidates
                .iter()
                .map(|t| by_pair[&(&set.source, t)].clone())
                .collect();
            let order = rank_candidates(&entries)?.into_iter().map(|m| m.target).collect();
            ranked.insert(set.source.clone(), order);
        }
        Some(ranking_metrics(&ranked, &reference.matched, 1)?)
    } else {
        None
    };

    let rr = if subset.unmatched_sets.is_empty() {
        None
    } else {
        Some(rejection_rate(&pred, &subset.unmatched_sets)?)
    };

    Ok(EvalReport {
        precision: prf.precision,
        recall: prf.recall,
        f1: prf.f1,
        hits_at_1: ranking.map(|r| r.hits_at_k),
        mrr: ranking.map(|r| r.mrr),
        rejection_rate: rr,
        n_predicted: pred.len(),
        n_reference: reference.matched.len(),
        n_unreferenced: reference.unmatched_sources.len(),
        true_positives: prf.true_positives,
        settings,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunRecord {
    source: ConceptIri,
    target: ConceptIri,
    answer: Answer,
    yes_prob: Option<f64>,
    no_prob: Option<f64>,
}

/// One JSON object per line, in the given order.
pub fn write_scored_run(ms: &[ScoredMapping]) -> Vec<u8> {
    let mut out = Vec::new();
    for m in ms {
        serde_json::to_writer(
            &mut out,
            &RunRecord {
                source: m.source.clone(),
                target: m.target.clone(),
                answer: m.verdict.answer,
                yes_prob: m.verdict.yes_prob,
                no_prob: m.verdict.no_prob,
            },
        )
        .expect("record serializes");
        out.push(b'\n');
    }
    out
}

pub fn read_scored_run(bytes: &[u8]) -> Result<Vec<ScoredMapping>, EvalError> {
    let text = std::str::from_utf8(bytes).map_err(|e| EvalError::Jsonl {
        line: 0,
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| EvalError::Jsonl { line: i + 1, message };
        let r: RunRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        let verdict = match (r.yes_prob, r.no_prob) {
            (Some(y), Some(n)) => Verdict::with_answer(r.answer, y, n).map_err(|e| err(e.to_string()))?,
            (None, None) => Verdict::text_only(r.answer),
            _ => return Err(err("only one probability present".into())),
        };
        out.push(ScoredMapping::new(r.source, r.target, verdict));
    }
    Ok(out)
}
