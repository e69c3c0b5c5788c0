//! Builds the (50 + 50) x 100 evaluation subset from a synthetic 2,000-concept
//! ontology pair and checks its structure.
//!
//! ```bash
//! cargo run -p ontalign --example make_subset
//! ```

use ontalign::dataset::{assemble_subset, SubsetParams};
use ontalign::retrieval::{InvertedIndex, SubwordVocab};
use ontalign::synthetic::synthetic_pair;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pair = synthetic_pair(2000, 600, 7);
    let index = InvertedIndex::build(&pair.target, &SubwordVocab::builtin());
    let params = SubsetParams {
        seed: 2024,
        ..SubsetParams::default()
    };
    let (subset, alignment) = assemble_subset(&pair.source, &pair.target, &pair.reference, &index, &params)?;

    println!(
        "{} matched sets, {} unmatched sets, {} pairs",
        subset.matched_sets.len(),
        subset.unmatched_sets.len(),
        subset.total_pairs()
    );
    println!("{} reference pairs, {} unreferenced sources", alignment.matched.len(), alignment.unmatched_sources.len());

    let first = &subset.matched_sets[0];
    let label = |iri| pair.target.get(iri).map(|c| c.primary_label().to_owned()).unwrap_or_default();
    println!("\nsource {} ({})", first.source, pair.source.get(&first.source).unwrap().primary_label());
    println!("ground truth {} ({})", first.ground_truth.as_ref().unwrap(), label(first.ground_truth.as_ref().unwrap()));
    for c in first.candidates.iter().take(5) {
        println!("  candidate {c} ({})", label(c));
    }

    let jsonl = subset.to_jsonl();
    println!("\nsubset JSONL: {} bytes, first line:", jsonl.len());
    println!("{}", String::from_utf8_lossy(&jsonl).lines().next().unwrap_or_default().chars().take(160).collect::<String>());
    Ok(())
}
