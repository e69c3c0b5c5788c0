//! Sub-word tokenization and idf-scored candidate retrieval over an inverted
//! index of target-ontology concepts.

mod index;
mod vocab;

pub use index::{idf_weight, label_tokens, IndexError, InvertedIndex};
pub use vocab::{SubwordVocab, DEFAULT_CONTINUATION_PREFIX, UNK_TOKEN};
