use std::collections::{BTreeMap, BTreeSet};

use super::DatasetError;
use crate::ontology::ConceptIri;

pub const TSV_HEADER: &str = "SrcEntity\tTgtEntity\tScore";

/// Full ground-truth equivalence mappings between two ontologies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceMappings {
    by_source: BTreeMap<ConceptIri, BTreeSet<ConceptIri>>,
}

impl ReferenceMappings {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (ConceptIri, ConceptIri)>) -> Self {
        let mut by_source: BTreeMap<ConceptIri, BTreeSet<ConceptIri>> = BTreeMap::new();
        for (src, tgt) in pairs {
            by_source.entry(src).or_default().insert(tgt);
        }
        Self { by_source }
    }

    /// Reads the `SrcEntity\tTgtEntity\tScore` TSV format. The score column
    /// is ignored.
    pub fn from_tsv(text: &str) -> Result<Self, DatasetError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end_matches('\r') == TSV_HEADER => {}
            Some((_, header)) => {
                return Err(DatasetError::Tsv {
                    line: 1,
                    message: format!("expected header {TSV_HEADER:?}, found {header:?}"),
                })
            }
            None => {
                return Err(DatasetError::Tsv {
                    line: 1,
                    message: "empty reference file".into(),
                })
            }
        }
        let mut pairs = Vec::new();
        for (i, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(src), Some(tgt)) = (fields.next(), fields.next()) else {
                return Err(DatasetError::Tsv {
                    line: i + 1,
                    message: "expected at least two tab-separated fields".into(),
                });
            };
            let iri = |s: &str| {
                ConceptIri::new(s.trim()).map_err(|e| DatasetError::Tsv {
                    line: i + 1,
                    message: e.to_string(),
                })
            };
            pairs.push((iri(src)?, iri(tgt)?));
        }
        Ok(Self::from_pairs(pairs))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{TSV_HEADER}\n");
        for (src, tgt) in self.pairs() {
            out.push_str(&format!("{src}\t{tgt}\t1.0\n"));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.by_source.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_source.is_empty()
    }

    /// Pairs sorted by (source, target).
    pub fn pairs(&self) -> impl Iterator<Item = (&ConceptIri, &ConceptIri)> {
        self.by_source
            .iter()
            .flat_map(|(s, ts)| ts.iter().map(move |t| (s, t)))
    }

    pub fn targets_of(&self, source: &ConceptIri) -> Option<&BTreeSet<ConceptIri>> {
        self.by_source.get(source)
    }

    pub fn is_matched_source(&self, source: &ConceptIri) -> bool {
        self.by_source.contains_key(source)
    }

    pub fn contains(&self, source: &ConceptIri, target: &ConceptIri) -> bool {
        self.by_source
            .get(source)
            .is_some_and(|ts| ts.contains(target))
    }
}

/// Reference restricted to the sources of one evaluation subset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceAlignment {
    pub matched: BTreeSet<(ConceptIri, ConceptIri)>,
    pub unmatched_sources: BTreeSet<ConceptIri>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_round_trip_and_score_ignored() {
        let text = "SrcEntity\tTgtEntity\tScore\nsrc:a\ttgt:x\t0.7\r\nsrc:a\ttgt:y\t1.0\n\nsrc:b\ttgt:z\n";
        let r = ReferenceMappings::from_tsv(text).unwrap();
        assert_eq!(r.len(), 3);
        let a = ConceptIri::new("src:a").unwrap();
        assert_eq!(r.targets_of(&a).unwrap().len(), 2);
        let back = ReferenceMappings::from_tsv(&r.to_tsv()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn bad_header() {
        let err = ReferenceMappings::from_tsv("src\ttgt\nsrc:a\ttgt:b\n").unwrap_err();
        assert!(matches!(err, DatasetError::Tsv { line: 1, .. }));
    }

    #[test]
    fn short_row_reports_line() {
        let err = ReferenceMappings::from_tsv("SrcEntity\tTgtEntity\tScore\na\tb\t1\nlonely\n")
            .unwrap_err();
        assert!(matches!(err, DatasetError::Tsv { line: 3, .. }), "{err}");
    }
}
