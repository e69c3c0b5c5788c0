//! RDF/XML ingestion for the subset of the syntax that ontology exports use
//! for named classes: typed node elements, `rdfs:subClassOf` with
//! `rdf:resource` (or a nested named node), and literal label annotations.
//!
//! The document is first flattened into triples, then classes are read off
//! the triples. Blank-node subjects, restrictions and collections are parsed
//! only far enough to be skipped.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap, HashSet};

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::name::ResolveResult;
use quick_xml::NsReader;

use super::{Concept, ConceptIri, Ontology, OntologyError};

const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
const OWL_NS: &str = "http://www.w3.org/2002/07/owl#";

pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const SKOS_PREF_LABEL: &str = "http://www.w3.org/2004/02/skos/core#prefLabel";
pub const OBO_EXACT_SYNONYM: &str = "http://www.geneontology.org/formats/oboInOwl#hasExactSynonym";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdfXmlConfig {
    /// Full IRIs of the annotation properties read as concept labels.
    pub label_properties: Vec<String>,
}

impl Default for RdfXmlConfig {
    fn default() -> Self {
        Self {
            label_properties: vec![
                RDFS_LABEL.to_owned(),
                SKOS_PREF_LABEL.to_owned(),
                OBO_EXACT_SYNONYM.to_owned(),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Iri(String),
    Blank(usize),
}

#[derive(Debug)]
enum Object {
    Node(Node),
    Literal(String),
}

#[derive(Debug)]
struct Triple {
    subject: Node,
    predicate: String,
    object: Object,
}

#[derive(Debug)]
enum Frame {
    Root,
    Node(Node),
    Property {
        subject: Node,
        predicate: String,
        text: String,
        object: Option<Node>,
        /// Object already emitted from an attribute (`rdf:resource`).
        done: bool,
    },
    Skip,
}

struct Parser<'a> {
    reader: NsReader<&'a [u8]>,
    document: &'a [u8],
    entities: HashMap<String, String>,
    frames: Vec<(Frame, String)>,
    triples: Vec<Triple>,
    next_blank: usize,
    named_blanks: HashMap<String, usize>,
    base: String,
}

/// Parses an RDF/XML document into an ontology of its named classes.
///
/// A class is kept when it carries at least one label from
/// `config.label_properties`. Superclasses that are not named classes of the
/// document are ignored.
pub fn parse_rdfxml(document: &[u8], config: &RdfXmlConfig) -> Result<Ontology, OntologyError> {
    let mut parser = Parser {
        reader: NsReader::from_reader(document),
        document,
        entities: HashMap::new(),
        frames: Vec::new(),
        triples: Vec::new(),
        next_blank: 0,
        named_blanks: HashMap::new(),
        base: String::new(),
    };
    parser.run()?;
    build_ontology(parser.triples, config)
}

fn build_ontology(triples: Vec<Triple>, config: &RdfXmlConfig) -> Result<Ontology, OntologyError> {
    let rdf_type = format!("{RDF_NS}type");
    let sub_class_of = format!("{RDFS_NS}subClassOf");
    let class_types: HashSet<String> = [format!("{OWL_NS}Class"), format!("{RDFS_NS}Class")].into();
    let label_props: HashSet<&str> = config.label_properties.iter().map(String::as_str).collect();

    let mut order: Vec<String> = Vec::new();
    let mut classes: HashSet<String> = HashSet::new();
    let mut labels: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut parents: BTreeMap<&str, Vec<String>> = BTreeMap::new();

    for t in &triples {
        let Node::Iri(subject) = &t.subject else {
            continue;
        };
        match &t.object {
            Object::Node(Node::Iri(o)) if t.predicate == rdf_type && class_types.contains(o) => {
                if classes.insert(subject.clone()) {
                    order.push(subject.clone());
                }
            }
            Object::Node(Node::Iri(o)) if t.predicate == sub_class_of => {
                parents.entry(subject).or_default().push(o.clone());
            }
            Object::Literal(text) if label_props.contains(t.predicate.as_str()) => {
                labels.entry(subject).or_default().push(text.clone());
            }
            _ => {}
        }
    }

    let mut concepts = Vec::new();
    for iri in order {
        let Some(class_labels) = labels.remove(iri.as_str()) else {
            continue;
        };
        let class_parents = parents
            .remove(iri.as_str())
            .unwrap_or_default()
            .into_iter()
            .filter(|p| classes.contains(p))
            .filter_map(|p| ConceptIri::new(p).ok());
        let Ok(iri) = ConceptIri::new(iri) else {
            continue;
        };
        match Concept::new(iri, class_labels, class_parents) {
            Ok(c) => concepts.push(c),
            Err(OntologyError::NoLabels(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if concepts.is_empty() {
        return Err(OntologyError::Empty);
    }
    Ok(Ontology::from_concepts(concepts))
}

impl<'a> Parser<'a> {
    fn run(&mut self) -> Result<(), OntologyError> {
        loop {
            let event = self.reader.read_event().map_err(|e| self.xml_error(e.to_string()))?;
            match event {
                Event::Start(e) => self.start(&e)?,
                Event::Empty(e) => {
                    self.start(&e)?;
                    self.end();
                }
                Event::End(_) => self.end(),
                Event::Text(t) => {
                    let text = t
                        .unescape_with(|name| self.resolve_entity(name))
                        .map_err(|e| self.xml_error(e.to_string()))?
                        .into_owned();
                    self.push_text(&text);
                }
                Event::CData(c) => {
                    let text = String::from_utf8_lossy(&c).into_owned();
                    self.push_text(&text);
                }
                Event::DocType(d) => {
                    let raw = String::from_utf8_lossy(&d).into_owned();
                    self.entities.extend(parse_entity_declarations(&raw));
                }
                Event::Eof => break,
                _ => {}
            }
        }
        if !self.frames.is_empty() {
            return Err(self.xml_error("unexpected end of document".into()));
        }
        Ok(())
    }

    fn resolve_entity(&self, name: &str) -> Option<&str> {
        self.entities
            .get(name)
            .map(String::as_str)
            .or_else(|| resolve_predefined_entity(name))
    }

    fn xml_error(&self, message: String) -> OntologyError {
        let pos = (self.reader.error_position() as usize).min(self.document.len());
        let pos = if pos == 0 {
            (self.reader.buffer_position() as usize).min(self.document.len())
        } else {
            pos
        };
        let before = &self.document[..pos];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let column = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
        OntologyError::Xml {
            line,
            column,
            message,
        }
    }

    fn expanded_name(&self, e: &BytesStart<'_>) -> String {
        let (ns, local) = self.reader.resolve_element(e.name());
        let local = String::from_utf8_lossy(local.as_ref());
        match ns {
            ResolveResult::Bound(ns) => format!("{}{}", String::from_utf8_lossy(ns.as_ref()), local),
            _ => local.into_owned(),
        }
    }

    fn fresh_blank(&mut self) -> Node {
        self.next_blank += 1;
        Node::Blank(self.next_blank)
    }

    fn named_blank(&mut self, id: &str) -> Node {
        if let Some(&n) = self.named_blanks.get(id) {
            return Node::Blank(n);
        }
        let Node::Blank(n) = self.fresh_blank() else {
            unreachable!()
        };
        self.named_blanks.insert(id.to_owned(), n);
        Node::Blank(n)
    }

    fn start(&mut self, e: &BytesStart<'_>) -> Result<(), OntologyError> {
        let inherited_base = self
            .frames
            .last()
            .map(|(_, b)| b.clone())
            .unwrap_or_else(|| self.base.clone());
        let name = self.expanded_name(e);

        let mut base = inherited_base;
        // (expanded attribute name, value), excluding namespace declarations
        let mut attrs: Vec<(String, String)> = Vec::new();
        for attr in e.attributes() {
            let attr = attr.map_err(|err| self.xml_error(err.to_string()))?;
            let key = attr.key.as_ref();
            if key == b"xmlns" || key.starts_with(b"xmlns:") {
                continue;
            }
            let value = attr
                .decode_and_unescape_value_with(self.reader.decoder(), |n| self.resolve_entity(n))
                .map_err(|err| self.xml_error(err.to_string()))?
                .into_owned();
            if key == b"xml:base" {
                base = value;
                continue;
            }
            if key.starts_with(b"xml:") {
                continue;
            }
            let (ns, local) = self.reader.resolve_attribute(attr.key);
            let local = String::from_utf8_lossy(local.as_ref());
            let expanded = match ns {
                ResolveResult::Bound(ns) => {
                    format!("{}{}", String::from_utf8_lossy(ns.as_ref()), local)
                }
                _ => local.into_owned(),
            };
            attrs.push((expanded, value));
        }
        let attr = |k: &str| attrs.iter().find(|(n, _)| n == k).map(|(_, v)| v.as_str());

        enum Ctx {
            Skip,
            Top,
            Root,
            Property,
            Node(Node),
        }
        let ctx = match self.frames.last().map(|(f, _)| f) {
            None if name == format!("{RDF_NS}RDF") => Ctx::Root,
            None => Ctx::Top,
            Some(Frame::Skip)
            | Some(Frame::Property { done: true, .. })
            | Some(Frame::Property { object: Some(_), .. }) => Ctx::Skip,
            Some(Frame::Root) => Ctx::Top,
            Some(Frame::Property { .. }) => Ctx::Property,
            Some(Frame::Node(subject)) => Ctx::Node(subject.clone()),
        };
        let frame = match ctx {
            Ctx::Skip => Frame::Skip,
            Ctx::Root => Frame::Root,
            Ctx::Top => self.node_element(&name, &attrs, &base),
            Ctx::Property => {
                let node = self.node_element(&name, &attrs, &base);
                if let (Frame::Node(subject), Some((Frame::Property { object, .. }, _))) =
                    (&node, self.frames.last_mut())
                {
                    *object = Some(subject.clone());
                }
                node
            }
            Ctx::Node(subject) => {
                let parse_type = attr(&format!("{RDF_NS}parseType")).map(str::to_owned);
                self.property_element(subject, name, &attrs, &base, parse_type.as_deref())
            }
        };
        self.frames.push((frame, base));
        Ok(())
    }

    fn node_element(&mut self, name: &str, attrs: &[(String, String)], base: &str) -> Frame {
        let get = |k: String| attrs.iter().find(|(n, _)| *n == k).map(|(_, v)| v.clone());
        let subject = if let Some(about) = get(format!("{RDF_NS}about")) {
            Node::Iri(resolve_iri(base, &about))
        } else if let Some(id) = get(format!("{RDF_NS}ID")) {
            Node::Iri(format!("{}#{}", strip_fragment(base), id))
        } else if let Some(id) = get(format!("{RDF_NS}nodeID")) {
            self.named_blank(&id)
        } else {
            self.fresh_blank()
        };
        if name != format!("{RDF_NS}Description") {
            self.triples.push(Triple {
                subject: subject.clone(),
                predicate: format!("{RDF_NS}type"),
                object: Object::Node(Node::Iri(name.to_owned())),
            });
        }
        for (key, value) in attrs {
            if key == &format!("{RDF_NS}type") {
                self.triples.push(Triple {
                    subject: subject.clone(),
                    predicate: key.clone(),
                    object: Object::Node(Node::Iri(resolve_iri(base, value))),
                });
            } else if !key.starts_with(RDF_NS) {
                self.triples.push(Triple {
                    subject: subject.clone(),
                    predicate: key.clone(),
                    object: Object::Literal(value.clone()),
                });
            }
        }
        Frame::Node(subject)
    }

    fn property_element(
        &mut self,
        subject: Node,
        predicate: String,
        attrs: &[(String, String)],
        base: &str,
        parse_type: Option<&str>,
    ) -> Frame {
        let get = |k: String| attrs.iter().find(|(n, _)| *n == k).map(|(_, v)| v.clone());
        if let Some(resource) = get(format!("{RDF_NS}resource")) {
            self.triples.push(Triple {
                subject,
                predicate,
                object: Object::Node(Node::Iri(resolve_iri(base, &resource))),
            });
            return Frame::Property {
                subject: Node::Blank(0),
                predicate: String::new(),
                text: String::new(),
                object: None,
                done: true,
            };
        }
        if let Some(id) = get(format!("{RDF_NS}nodeID")) {
            let object = self.named_blank(&id);
            self.triples.push(Triple {
                subject,
                predicate,
                object: Object::Node(object),
            });
            return Frame::Skip;
        }
        match parse_type {
            Some("Resource") => {
                let object = self.fresh_blank();
                self.triples.push(Triple {
                    subject,
                    predicate,
                    object: Object::Node(object.clone()),
                });
                Frame::Node(object)
            }
            Some(_) => Frame::Skip,
            None => Frame::Property {
                subject,
                predicate,
                text: String::new(),
                object: None,
                done: false,
            },
        }
    }

    fn push_text(&mut self, text: &str) {
        if let Some((Frame::Property { text: buf, object: None, done: false, .. }, _)) =
            self.frames.last_mut()
        {
            buf.push_str(text);
        }
    }

    fn end(&mut self) {
        let Some((frame, _)) = self.frames.pop() else {
            return;
        };
        if let Frame::Property {
            subject,
            predicate,
            text,
            object,
            done: false,
        } = frame
        {
            let object = match object {
                Some(node) => Object::Node(node),
                None => Object::Literal(text),
            };
            self.triples.push(Triple {
                subject,
                predicate,
                object,
            });
        }
    }
}

fn strip_fragment(iri: &str) -> &str {
    iri.split('#').next().unwrap_or(iri)
}

fn resolve_iri(base: &str, reference: &str) -> String {
    let has_scheme = reference
        .split_once(':')
        .is_some_and(|(scheme, _)| !scheme.is_empty() && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c)));
    if has_scheme || base.is_empty() {
        return reference.to_owned();
    }
    if reference.is_empty() {
        return strip_fragment(base).to_owned();
    }
    if reference.starts_with('#') {
        return format!("{}{}", strip_fragment(base), reference);
    }
    let dir: Cow<'_, str> = match strip_fragment(base).rfind('/') {
        Some(i) => Cow::Borrowed(&base[..=i]),
        None => Cow::Owned(format!("{base}/")),
    };
    format!("{dir}{reference}")
}

/// Reads `<!ENTITY name "value">` declarations from a DOCTYPE body.
fn parse_entity_declarations(doctype: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut rest = doctype;
    while let Some(i) = rest.find("<!ENTITY") {
        rest = &rest[i + "<!ENTITY".len()..];
        let trimmed = rest.trim_start();
        let name: String = trimmed
            .chars()
            .take_while(|c| !c.is_whitespace())
            .collect();
        let after = trimmed[name.len()..].trim_start();
        let Some(quote) = after.chars().next().filter(|q| *q == '"' || *q == '\'') else {
            continue;
        };
        if let Some(end) = after[1..].find(quote) {
            out.push((name, after[1..1 + end].to_owned()));
        }
    }
    out
}
