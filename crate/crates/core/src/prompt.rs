//! The concept-identification prompt.
//!
//! With hierarchy enabled the prompt carries parent and child names for both
//! concepts; with it disabled every hierarchy-related phrase and line is left
//! out, leaving a names-only prompt.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::dataset::seeded_rng;
use crate::ontology::{ConceptIri, Direction, Ontology, OntologyError};

pub const DEFAULT_CONTEXT_CAP: usize = 5;

/// What the prompt shows about one concept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptView {
    pub names: Vec<String>,
    pub parent_names: Vec<String>,
    pub child_names: Vec<String>,
}

impl ConceptView {
    pub fn names_only(names: Vec<String>) -> Self {
        Self {
            names,
            parent_names: Vec::new(),
            child_names: Vec::new(),
        }
    }
}

/// All labels of `iri`, plus the first label of up to `cap` parents and
/// children. Neighbors are taken in IRI order when there are at most `cap` of
/// them; otherwise `cap` are sampled with `seed` and then put in IRI order.
pub fn gather_context(
    ontology: &Ontology,
    iri: &ConceptIri,
    cap: usize,
    seed: u64,
) -> Result<ConceptView, OntologyError> {
    let concept = ontology.concept(iri)?;
    let pick = |direction: Direction, stream: u64| -> Result<Vec<String>, OntologyError> {
        let neighbors = ontology.hierarchy_neighbors(iri, direction)?;
        let chosen: Vec<usize> = if neighbors.len() <= cap {
            (0..neighbors.len()).collect()
        } else {
            let mut idx = index::sample(&mut seeded_rng(seed ^ stream), neighbors.len(), cap).into_vec();
            idx.sort_unstable();
            idx
        };
        Ok(chosen
            .into_iter()
            .map(|i| neighbors[i].primary_label().to_owned())
            .collect())
    };
    Ok(ConceptView {
        names: concept.labels().to_vec(),
        parent_names: pick(Direction::Parent, 0)?,
        child_names: pick(Direction::Child, 0x9e37_79b9_7f4a_7c15)?,
    })
}

fn name_list(names: &[String]) -> String {
    if names.is_empty() {
        return "None".to_owned();
    }
    let quoted: Vec<String> = names.iter().map(|n| format!("\"{n}\"")).collect();
    format!("[{}]", quoted.join(", "))
}

fn concept_block(out: &mut Vec<String>, side: &str, view: &ConceptView, include_hierarchy: bool) {
    out.push(format!("{side} Concept Names: {}", name_list(&view.names)));
    if include_hierarchy {
        out.push(format!(
            "Parent Concepts of the {side} Concept: {}",
            name_list(&view.parent_names)
        ));
        out.push(format!(
            "Child Concepts of the {side} Concept: {}",
            name_list(&view.child_names)
        ));
    }
}

/// Renders the prompt for a source/target pair. Paragraphs are separated by
/// blank lines.
pub fn render_prompt(source: &ConceptView, target: &ConceptView, include_hierarchy: bool) -> String {
    let (names_and, analyze_and, based_on_and) = if include_hierarchy {
        (
            " and hierarchical relationships",
            " and the hierarchical information",
            " and hierarchical relationships",
        )
    } else {
        ("", "", "")
    };
    let mut paragraphs = vec![format!(
        "Given the lists of names{names_and} associated with two concepts, your task is to \
         determine whether these concepts are identical or not. Consider the following:"
    )];
    concept_block(&mut paragraphs, "Source", source, include_hierarchy);
    concept_block(&mut paragraphs, "Target", target, include_hierarchy);
    paragraphs.push(format!(
        "Analyze the names{analyze_and} provided for each concept and provide a conclusion on \
         whether these two concepts are identical or different (\"Yes\" or \"No\") based on \
         their associated names{based_on_and}."
    ));
    paragraphs.join("\n\n")
}
