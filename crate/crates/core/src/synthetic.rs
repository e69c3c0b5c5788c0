//! Seeded synthetic ontology pairs with a known reference alignment, for
//! demos and tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::{seeded_rng, ReferenceMappings};
use crate::ontology::{Concept, ConceptIri, Ontology};

const MODIFIERS: &[&str] = &[
    "left", "right", "upper", "lower", "anterior", "posterior", "medial", "lateral", "inner", "outer",
    "acute", "chronic", "primary", "secondary", "malignant", "benign", "congenital", "peripheral",
];

const HEADS: &[&str] = &[
    "heart", "muscle", "artery", "vein", "valve", "lung", "kidney", "liver", "bone", "nerve", "brain",
    "skin", "gland", "duct", "tissue", "cell", "membrane", "vessel", "ligament", "tendon", "cartilage",
    "lobe", "cortex", "marrow", "joint", "ventricle", "atrium", "bronchus", "colon", "stomach", "spleen",
    "pancreas", "retina", "thyroid", "uterus", "ovary", "trachea", "ureter", "spine", "skull",
];

const KINDS: &[&str] = &[
    "disease", "disorder", "carcinoma", "tumor", "lesion", "infection", "inflammation", "fibrosis",
    "necrosis", "syndrome", "cyst", "ulcer", "pain", "structure", "region", "segment", "wall",
];

#[derive(Debug, Clone)]
pub struct SyntheticPair {
    pub source: Ontology,
    pub target: Ontology,
    pub reference: ReferenceMappings,
}

pub fn source_iri(i: usize) -> ConceptIri {
    ConceptIri::new(format!("http://example.org/src/S{i:05}")).expect("non-empty")
}

pub fn target_iri(i: usize) -> ConceptIri {
    ConceptIri::new(format!("http://example.org/tgt/T{i:05}")).expect("non-empty")
}

fn random_words(rng: &mut impl Rng) -> Vec<&'static str> {
    vec![
        MODIFIERS.choose(rng).copied().expect("non-empty"),
        HEADS.choose(rng).copied().expect("non-empty"),
        KINDS.choose(rng).copied().expect("non-empty"),
    ]
}

/// A label denoting the same thing with different surface form.
fn variant(words: &[&str], rng: &mut impl Rng) -> String {
    match rng.gen_range(0..3) {
        0 => format!("{} of {} {}", words[2], words[0], words[1]),
        1 => format!("{} {}s {}", words[0], words[1], words[2]),
        _ => format!("{} {} {} nos", words[0], words[1], words[2]),
    }
}

fn parents(i: usize, make: fn(usize) -> ConceptIri, rng: &mut impl Rng) -> Vec<ConceptIri> {
    if i == 0 || rng.gen_bool(0.1) {
        return Vec::new();
    }
    let mut ps = vec![make(rng.gen_range(0..i))];
    if rng.gen_bool(0.15) {
        ps.push(make(rng.gen_range(0..i)));
    }
    ps
}

/// `n_concepts` concepts per side; the first `n_references` source concepts
/// map one-to-one onto randomly chosen targets. About one in five reference
/// pairs shares a label verbatim.
pub fn synthetic_pair(n_concepts: usize, n_references: usize, seed: u64) -> SyntheticPair {
    assert!(n_references <= n_concepts);
    let mut rng = seeded_rng(seed);
    let target_words: Vec<Vec<&str>> = (0..n_concepts).map(|_| random_words(&mut rng)).collect();
    let target = Ontology::from_concepts((0..n_concepts).map(|i| {
        let mut labels = vec![target_words[i].join(" ")];
        if rng.gen_bool(0.3) {
            labels.push(format!("{} {}", target_words[i][1], target_words[i][2]));
        }
        Concept::new(target_iri(i), labels, parents(i, target_iri, &mut rng)).expect("labels present")
    }));

    let mut targets: Vec<usize> = (0..n_concepts).collect();
    targets.shuffle(&mut rng);
    targets.truncate(n_references);

    let source = Ontology::from_concepts((0..n_concepts).map(|i| {
        let labels = if i < n_references {
            let words = &target_words[targets[i]];
            if rng.gen_bool(0.2) {
                vec![words.join(" ")]
            } else {
                vec![variant(words, &mut rng)]
            }
        } else {
            vec![variant(&random_words(&mut rng), &mut rng)]
        };
        Concept::new(source_iri(i), labels, parents(i, source_iri, &mut rng)).expect("labels present")
    }));

    let reference = ReferenceMappings::from_pairs(
        targets.iter().enumerate().map(|(i, &t)| (source_iri(i), target_iri(t))),
    );
    SyntheticPair {
        source,
        target,
        reference,
    }
}
