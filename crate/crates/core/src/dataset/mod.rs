//! Construction of hard evaluation subsets: matched sources whose labels
//! share nothing with their reference target, unmatched sources, and one
//! fixed-size candidate list per source drawn from the idf index.
//!
//! All randomness is seeded. Each sampling step draws from its own stream
//! derived from the subset seed (see [`derive_seed`]), so changing one step
//! never perturbs another.

mod reference;
mod subset;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ontology::ConceptIri;

pub use reference::{ReferenceAlignment, ReferenceMappings, TSV_HEADER};
pub use subset::{
    assemble_subset, filter_string_matched, sample_matched_sources, sample_unmatched_sources,
    CandidateBuilder, CandidateSet, SubsetParams, TaskSubset,
};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("reference file line {line}: {message}")]
    Tsv { line: usize, message: String },
    #[error("{side} ontology has no concept {iri}")]
    UnknownConcept { side: &'static str, iri: ConceptIri },
    #[error("requested {requested} matched sources but only {available} distinct sources remain ({pairs} pairs after filtering)")]
    InsufficientMatched {
        requested: usize,
        available: usize,
        pairs: usize,
    },
    #[error("requested {requested} unmatched sources but only {available} source concepts have no reference match")]
    InsufficientUnmatched { requested: usize, available: usize },
    #[error("candidate set for {concept} needs {size} targets but only {available} are eligible")]
    TargetTooSmall {
        concept: ConceptIri,
        size: usize,
        available: usize,
    },
    #[error("invalid candidate-set size {size}: {reason}")]
    InvalidSize { size: usize, reason: &'static str },
    #[error("subset line {line}: {message}")]
    Jsonl { line: usize, message: String },
    #[error("subset invariant violated: {0}")]
    Invariant(String),
}

/// Derives an independent seed for a named sampling stream.
pub fn derive_seed(seed: u64, stream: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stream.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Portable, version-stable generator used for every sampling step.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
