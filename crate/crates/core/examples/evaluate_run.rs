//! Ranks, thresholds and scores a small hand-made run.
//!
//! ```bash
//! cargo run -p ontalign --example evaluate_run
//! ```

use std::collections::BTreeMap;

use ontalign::dataset::{CandidateSet, TaskSubset};
use ontalign::eval::{
    apply_threshold, build_report, rank_candidates, ReportSettings, ScoredMapping,
};
use ontalign::scorer::Verdict;
use ontalign::ConceptIri;

fn iri(s: &str) -> ConceptIri {
    ConceptIri::new(s).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let set = |s: &str, gt: Option<&str>, c: &[&str]| CandidateSet {
        source: iri(s),
        ground_truth: gt.map(iri),
        candidates: c.iter().map(|x| iri(x)).collect(),
    };
    let subset = TaskSubset {
        matched_sets: vec![set("s1", Some("t1"), &["t1", "t2", "t3"]), set("s2", Some("t5"), &["t4", "t5", "t6"])],
        unmatched_sets: vec![set("u1", None, &["t1", "t4", "t7"])],
        seed: 0,
    };
    let probs: BTreeMap<(&str, &str), (f64, f64)> = [
        (("s1", "t1"), (0.93, 0.07)),
        (("s1", "t2"), (0.70, 0.30)),
        (("s1", "t3"), (0.10, 0.85)),
        (("s2", "t4"), (0.60, 0.40)),
        (("s2", "t5"), (0.20, 0.30)),
        (("s2", "t6"), (0.05, 0.90)),
        (("u1", "t1"), (0.30, 0.60)),
        (("u1", "t4"), (0.55, 0.45)),
        (("u1", "t7"), (0.01, 0.99)),
    ]
    .into_iter()
    .collect();
    let run: Vec<ScoredMapping> = subset
        .pairs()
        .map(|(s, t)| {
            let (y, n) = probs[&(s.as_str(), t.as_str())];
            Ok(ScoredMapping::new(s.clone(), t.clone(), Verdict::from_probabilities(y, n)?))
        })
        .collect::<Result<_, ontalign::scorer::ScorerError>>()?;

    let s2: Vec<ScoredMapping> = run.iter().filter(|m| m.source.as_str() == "s2").cloned().collect();
    let order: Vec<String> = rank_candidates(&s2)?.iter().map(|m| m.target.to_string()).collect();
    println!("ranking for s2: {order:?}");

    for tau in [0.0, 0.65] {
        println!("\npredicted at tau={tau}: {:?}", apply_threshold(&run, tau));
        let settings = ReportSettings {
            threshold: tau,
            with_hierarchy: false,
            scorer_id: "hand-made".into(),
            seed: 0,
        };
        print!("{}", build_report(&subset, &subset.reference(), &run, settings)?.to_json());
    }
    Ok(())
}
