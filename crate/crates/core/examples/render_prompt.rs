//! Renders the concept-identification prompt with and without hierarchy
//! context.
//!
//! ```bash
//! cargo run -p ontalign --example render_prompt
//! ```

use ontalign::ontology::{Concept, ConceptIri, Ontology};
use ontalign::prompt::{gather_context, render_prompt, DEFAULT_CONTEXT_CAP};

fn iri(s: &str) -> ConceptIri {
    ConceptIri::new(s).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = Ontology::from_concepts([
        Concept::new(iri("src:organ"), vec!["organ".into()], vec![])?,
        Concept::new(iri("src:heart"), vec!["heart".into()], vec![iri("src:organ")])?,
        Concept::new(iri("src:myo"), vec!["myocardium".into(), "heart muscle".into()], vec![iri("src:heart")])?,
    ]);
    let target = Ontology::from_concepts([
        Concept::new(iri("tgt:muscle"), vec!["muscle tissue".into()], vec![])?,
        Concept::new(iri("tgt:cm"), vec!["cardiac muscle tissue".into()], vec![iri("tgt:muscle")])?,
        Concept::new(iri("tgt:trab"), vec!["trabecular myocardium".into()], vec![iri("tgt:cm")])?,
    ]);
    let s = gather_context(&source, &iri("src:myo"), DEFAULT_CONTEXT_CAP, 0)?;
    let t = gather_context(&target, &iri("tgt:cm"), DEFAULT_CONTEXT_CAP, 0)?;

    println!("--- hierarchy on ---\n{}\n", render_prompt(&s, &t, true));
    println!("--- hierarchy off ---\n{}", render_prompt(&s, &t, false));
    Ok(())
}
