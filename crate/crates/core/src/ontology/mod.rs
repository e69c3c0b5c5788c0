//! Ontologies as sets of named concepts with labels and a parent/child
//! hierarchy.
//!
//! An [`Ontology`] is immutable once built. Construction goes through
//! [`Ontology::from_concepts`], which drops parent edges that point outside
//! the concept map and derives the child index as the exact inverse of the
//! parent relation.

mod json_dump;
mod label;
mod rdfxml;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use json_dump::{parse_json_dump, serialize_json_dump};
pub use label::normalize_label;
pub use rdfxml::{parse_rdfxml, RdfXmlConfig, OBO_EXACT_SYNONYM, RDFS_LABEL, SKOS_PREF_LABEL};

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("XML syntax error at line {line}, column {column}: {message}")]
    Xml {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("document declares no named concept with a recognized label")]
    Empty,
    #[error("invalid concept record #{index}{}: {message}", iri.as_deref().map(|i| format!(" ({i})")).unwrap_or_default())]
    Schema {
        index: usize,
        iri: Option<String>,
        message: String,
    },
    #[error("malformed ontology dump: {0}")]
    Json(#[from] serde_json::Error),
    #[error("concept IRI must be non-empty")]
    EmptyIri,
    #[error("concept {0} has no usable label")]
    NoLabels(ConceptIri),
    #[error("unknown concept {0}")]
    UnknownConcept(ConceptIri),
}

/// IRI of a named concept; the unique key of a concept within one ontology.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConceptIri(String);

impl ConceptIri {
    pub fn new(value: impl Into<String>) -> Result<Self, OntologyError> {
        let value = value.into();
        if value.is_empty() {
            return Err(OntologyError::EmptyIri);
        }
        Ok(Self(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ConceptIri {
    type Error = OntologyError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<ConceptIri> for String {
    fn from(iri: ConceptIri) -> Self {
        iri.0
    }
}

impl fmt::Display for ConceptIri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ConceptIri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A named concept: IRI, labels in document order, asserted named parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    iri: ConceptIri,
    labels: Vec<String>,
    parents: BTreeSet<ConceptIri>,
}

impl Concept {
    /// Labels that normalize to the empty string or to an already seen label
    /// are dropped; a self-reference among `parents` is removed.
    pub fn new(
        iri: ConceptIri,
        labels: impl IntoIterator<Item = String>,
        parents: impl IntoIterator<Item = ConceptIri>,
    ) -> Result<Self, OntologyError> {
        let mut seen = BTreeSet::new();
        let labels: Vec<String> = labels
            .into_iter()
            .filter(|l| {
                let norm = normalize_label(l);
                !norm.is_empty() && seen.insert(norm)
            })
            .collect();
        if labels.is_empty() {
            return Err(OntologyError::NoLabels(iri));
        }
        let parents = parents.into_iter().filter(|p| *p != iri).collect();
        Ok(Self {
            iri,
            labels,
            parents,
        })
    }

    pub fn iri(&self) -> &ConceptIri {
        &self.iri
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// First stored label; every concept has at least one.
    pub fn primary_label(&self) -> &str {
        &self.labels[0]
    }

    pub fn parents(&self) -> &BTreeSet<ConceptIri> {
        &self.parents
    }

    pub fn normalized_labels(&self) -> BTreeSet<String> {
        self.labels.iter().map(|l| normalize_label(l)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Parent,
    Child,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    concepts: BTreeMap<ConceptIri, Concept>,
    children: BTreeMap<ConceptIri, BTreeSet<ConceptIri>>,
}

impl Ontology {
    /// Builds an ontology, merging repeated declarations of the same IRI and
    /// dropping parent edges to undeclared concepts.
    pub fn from_concepts(concepts: impl IntoIterator<Item = Concept>) -> Self {
        let mut map: BTreeMap<ConceptIri, Concept> = BTreeMap::new();
        for concept in concepts {
            match map.get_mut(&concept.iri) {
                Some(existing) => {
                    let mut seen = existing.normalized_labels();
                    for label in concept.labels {
                        if seen.insert(normalize_label(&label)) {
                            existing.labels.push(label);
                        }
                    }
                    existing.parents.extend(concept.parents);
                }
                None => {
                    map.insert(concept.iri.clone(), concept);
                }
            }
        }

        let declared: BTreeSet<ConceptIri> = map.keys().cloned().collect();
        let mut children: BTreeMap<ConceptIri, BTreeSet<ConceptIri>> = BTreeMap::new();
        for concept in map.values_mut() {
            concept.parents.retain(|p| declared.contains(p));
            for parent in &concept.parents {
                children
                    .entry(parent.clone())
                    .or_default()
                    .insert(concept.iri.clone());
            }
        }

        Self {
            concepts: map,
            children,
        }
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn get(&self, iri: &ConceptIri) -> Option<&Concept> {
        self.concepts.get(iri)
    }

    pub fn concept(&self, iri: &ConceptIri) -> Result<&Concept, OntologyError> {
        self.concepts
            .get(iri)
            .ok_or_else(|| OntologyError::UnknownConcept(iri.clone()))
    }

    pub fn contains(&self, iri: &ConceptIri) -> bool {
        self.concepts.contains_key(iri)
    }

    /// Concepts in IRI order.
    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn iris(&self) -> impl Iterator<Item = &ConceptIri> {
        self.concepts.keys()
    }

    pub fn children_of(&self, iri: &ConceptIri) -> impl Iterator<Item = &ConceptIri> {
        self.children.get(iri).into_iter().flatten()
    }

    /// Direct parents or children of `iri`, sorted by IRI.
    pub fn hierarchy_neighbors(
        &self,
        iri: &ConceptIri,
        direction: Direction,
    ) -> Result<Vec<&Concept>, OntologyError> {
        let concept = self.concept(iri)?;
        let neighbors: Vec<&ConceptIri> = match direction {
            Direction::Parent => concept.parents.iter().collect(),
            Direction::Child => self.children_of(iri).collect(),
        };
        Ok(neighbors.into_iter().map(|n| &self.concepts[n]).collect())
    }
}
