//! Tokenizes labels with the built-in sub-word vocabulary, indexes a
//! synthetic target ontology and retrieves idf-ranked candidates.
//!
//! ```bash
//! cargo run -p ontalign --example build_index
//! ```

use std::collections::BTreeSet;

use ontalign::retrieval::{InvertedIndex, SubwordVocab};
use ontalign::synthetic::synthetic_pair;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vocab = SubwordVocab::builtin();
    for word in ["myocarditis", "hepatocyte", "heart muscle", "xyz"] {
        println!("{word:>14} -> {:?}", vocab.tokenize(word));
    }

    let pair = synthetic_pair(500, 0, 3);
    let index = InvertedIndex::build(&pair.target, &vocab);
    println!("\n{} documents, {} distinct tokens", index.doc_count(), index.postings().len());

    let query = ["chronic kidney disease"];
    for (iri, score) in index.top_k_candidates(&query, 5, &BTreeSet::new()) {
        let label = pair.target.get(&iri).map(|c| c.primary_label()).unwrap_or("?");
        println!("{score:8.4}  {iri}  {label}");
    }

    let restored = InvertedIndex::from_json(&index.to_json())?;
    assert_eq!(restored.top_k_candidates(&query, 5, &BTreeSet::new()), index.top_k_candidates(&query, 5, &BTreeSet::new()));
    println!("\nindex JSON round trip ok");
    Ok(())
}
