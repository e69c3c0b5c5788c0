//! Canonical JSON dump: `{"concepts":[{"iri","labels","parents"}...]}` with
//! concepts sorted by IRI, labels in stored order and parents sorted.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Concept, ConceptIri, Ontology, OntologyError};

#[derive(Serialize)]
struct DumpOut<'a> {
    concepts: Vec<ConceptOut<'a>>,
}

#[derive(Serialize)]
struct ConceptOut<'a> {
    iri: &'a str,
    labels: &'a [String],
    parents: Vec<&'a str>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DumpIn {
    concepts: Vec<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConceptIn {
    iri: String,
    labels: Vec<String>,
    #[serde(default)]
    parents: Vec<String>,
}

pub fn serialize_json_dump(ontology: &Ontology) -> Vec<u8> {
    let dump = DumpOut {
        concepts: ontology
            .concepts()
            .map(|c| ConceptOut {
                iri: c.iri().as_str(),
                labels: c.labels(),
                parents: c.parents().iter().map(ConceptIri::as_str).collect(),
            })
            .collect(),
    };
    serde_json::to_vec(&dump).expect("dump serialization is infallible")
}

/// Parses a dump. Undeclared parent IRIs are dropped; a record with a bad
/// shape, an empty IRI, no usable label or a repeated IRI is rejected.
pub fn parse_json_dump(document: &[u8]) -> Result<Ontology, OntologyError> {
    let dump: DumpIn = serde_json::from_slice(document)?;
    let mut seen = BTreeSet::new();
    let mut concepts = Vec::with_capacity(dump.concepts.len());
    for (index, value) in dump.concepts.into_iter().enumerate() {
        let hint = value.get("iri").and_then(|v| v.as_str()).map(str::to_owned);
        let schema = |message: String| OntologyError::Schema {
            index,
            iri: hint.clone(),
            message,
        };
        let record: ConceptIn =
            serde_json::from_value(value).map_err(|e| schema(e.to_string()))?;
        let iri = ConceptIri::new(record.iri).map_err(|e| schema(e.to_string()))?;
        if !seen.insert(iri.clone()) {
            return Err(schema("duplicate concept IRI".into()));
        }
        let parents = record
            .parents
            .into_iter()
            .map(ConceptIri::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| schema(format!("parent: {e}")))?;
        let concept =
            Concept::new(iri, record.labels, parents).map_err(|e| schema(e.to_string()))?;
        concepts.push(concept);
    }
    Ok(Ontology::from_concepts(concepts))
}
