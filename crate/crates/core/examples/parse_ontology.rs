//! Parses a small RDF/XML ontology and prints its concepts, hierarchy and
//! canonical JSON dump.
//!
//! ```bash
//! cargo run -p ontalign --example parse_ontology [path/to/ontology.owl]
//! ```

use ontalign::ontology::{parse_rdfxml, serialize_json_dump, Direction, RdfXmlConfig};

const SAMPLE: &str = r##"<?xml version="1.0"?>
<!DOCTYPE rdf:RDF [ <!ENTITY ex "http://example.org/onto#"> ]>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
         xmlns:owl="http://www.w3.org/2002/07/owl#"
         xmlns:oboInOwl="http://www.geneontology.org/formats/oboInOwl#"
         xml:base="http://example.org/onto">
  <owl:Class rdf:about="#Heart">
    <rdfs:label>Heart</rdfs:label>
    <rdfs:subClassOf rdf:resource="&ex;Organ"/>
  </owl:Class>
  <owl:Class rdf:about="#Myocardium">
    <rdfs:label xml:lang="en">myocardium</rdfs:label>
    <oboInOwl:hasExactSynonym>heart muscle</oboInOwl:hasExactSynonym>
    <rdfs:subClassOf rdf:resource="#Heart"/>
  </owl:Class>
  <owl:Class rdf:about="#Organ">
    <rdfs:label>organ</rdfs:label>
  </owl:Class>
</rdf:RDF>
"##;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bytes = match std::env::args().nth(1) {
        Some(path) => std::fs::read(path)?,
        None => SAMPLE.as_bytes().to_vec(),
    };
    let onto = parse_rdfxml(&bytes, &RdfXmlConfig::default())?;
    println!("{} concepts", onto.len());
    for c in onto.concepts() {
        let parents: Vec<&str> = onto
            .hierarchy_neighbors(c.iri(), Direction::Parent)?
            .iter()
            .map(|p| p.primary_label())
            .collect();
        let children: Vec<&str> = onto
            .hierarchy_neighbors(c.iri(), Direction::Child)?
            .iter()
            .map(|p| p.primary_label())
            .collect();
        println!("{}  labels={:?} parents={parents:?} children={children:?}", c.iri(), c.labels());
    }
    println!("{}", String::from_utf8(serialize_json_dump(&onto))?);
    Ok(())
}
