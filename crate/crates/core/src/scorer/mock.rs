use std::collections::BTreeSet;

use sha2::{Digest, Sha256};

use super::{PairInput, PairScorer, ScorerError, Verdict};
use crate::ontology::ConceptIri;

/// Answers Yes with probability 1 exactly on the given pairs.
#[derive(Debug, Clone, Default)]
pub struct OracleScorer {
    truth: BTreeSet<(ConceptIri, ConceptIri)>,
}

impl OracleScorer {
    pub fn new(truth: impl IntoIterator<Item = (ConceptIri, ConceptIri)>) -> Self {
        Self {
            truth: truth.into_iter().collect(),
        }
    }

    fn is_true(&self, source: &ConceptIri, target: &ConceptIri) -> bool {
        self.truth.contains(&(source.clone(), target.clone()))
    }
}

impl PairScorer for OracleScorer {
    fn scorer_id(&self) -> String {
        "mock-oracle".to_owned()
    }

    fn key_material(&self, pair: &PairInput<'_>) -> String {
        format!(
            "{}\t{}\t{}",
            pair.source,
            pair.target,
            self.is_true(pair.source, pair.target)
        )
    }

    fn classify(&self, pair: &PairInput<'_>) -> Result<Verdict, ScorerError> {
        if self.is_true(pair.source, pair.target) {
            Verdict::from_probabilities(1.0, 0.0)
        } else {
            Verdict::from_probabilities(0.0, 1.0)
        }
    }
}

/// Pseudo-random probabilities derived from a hash of the seed and the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomScorer {
    pub seed: u64,
}

fn unit(bytes: &[u8]) -> f64 {
    let x = u64::from_le_bytes(bytes.try_into().expect("8 bytes"));
    (x >> 11) as f64 / (1u64 << 53) as f64
}

impl PairScorer for RandomScorer {
    fn scorer_id(&self) -> String {
        format!("mock-random:{}", self.seed)
    }

    fn key_material(&self, pair: &PairInput<'_>) -> String {
        format!("{}\t{}", pair.source, pair.target)
    }

    fn classify(&self, pair: &PairInput<'_>) -> Result<Verdict, ScorerError> {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(pair.source.as_str().as_bytes());
        h.update([0]);
        h.update(pair.target.as_str().as_bytes());
        let d = h.finalize();
        let yes = unit(&d[..8]);
        let no = (1.0 - yes) * unit(&d[8..16]);
        Verdict::from_probabilities(yes, no)
    }
}
