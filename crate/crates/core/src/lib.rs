//! Zero-shot ontology alignment with Yes/No concept classifiers.
//!
//! The crate covers the whole evaluation loop for equivalence matching
//! between a source and a target ontology:
//!
//! - [`ontology`]: named concepts, labels and the asserted subclass hierarchy,
//!   loaded from RDF/XML or a canonical JSON dump.
//! - [`retrieval`]: a greedy longest-match sub-word tokenizer and an inverted
//!   index with idf-scored candidate retrieval.
//! - [`dataset`]: construction of hard evaluation subsets (matched sources
//!   without shared labels, unmatched sources, fixed-size candidate sets).
//! - [`prompt`]: the concept-identification prompt with optional parent/child
//!   context.
//! - [`scorer`]: pluggable classifiers (HTTP endpoint, normalized edit
//!   similarity, mocks) and a persistent verdict cache.
//! - [`eval`]: ranking rule, thresholding, precision/recall/F1, Hits@K, MRR
//!   and rejection rate.
//! - [`pipeline`]: the `ingest → index → make-subset → score → evaluate`
//!   orchestration used by the `ontalign` binary.
//! - [`synthetic`]: seeded synthetic ontology pairs with a known alignment.
//!
//! Runnable walkthroughs for each capability live in `examples/`:
//!
//! ```bash
//! cargo run -p ontalign --example parse_ontology
//! cargo run -p ontalign --example full_pipeline
//! ```

pub mod dataset;
pub mod eval;
pub mod ontology;
pub mod pipeline;
pub mod prompt;
pub mod retrieval;
pub mod scorer;
pub mod synthetic;

pub use ontology::{Concept, ConceptIri, Ontology};
