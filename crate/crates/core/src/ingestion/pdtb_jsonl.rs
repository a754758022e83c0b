use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::{CharSpan, PdtbRelation, RelType, SpanSet};
use crate::taxonomy::{SenseLabel, TaxonomyTable};

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectiveLine {
    #[serde(default)]
    spans: Vec<CharSpan>,
    #[serde(default)]
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArgLine {
    spans: Vec<CharSpan>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationLine {
    doc_id: String,
    rel_id: String,
    #[serde(rename = "type")]
    rel_type: String,
    #[serde(default)]
    connective: ConnectiveLine,
    #[serde(default)]
    senses: Vec<String>,
    arg1: ArgLine,
    arg2: ArgLine,
}

/// One parsed line: the relation and the document it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdtbEntry {
    pub doc_id: String,
    pub relation: PdtbRelation,
}

/// Parses PDTB JSONL. Senses known to the bundled taxonomy are canonicalized;
/// unknown ones are kept verbatim.
pub fn parse_pdtb_jsonl(bytes: &[u8]) -> Result<Vec<PdtbEntry>, IngestError> {
    parse_pdtb_jsonl_with(bytes, TaxonomyTable::bundled())
}

pub fn parse_pdtb_jsonl_with(bytes: &[u8], taxonomy: &TaxonomyTable) -> Result<Vec<PdtbEntry>, IngestError> {
    let src = std::str::from_utf8(bytes).map_err(|e| IngestError::Syntax {
        line: 1,
        column: e.valid_up_to(),
        message: "invalid UTF-8".into(),
    })?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let entry = parse_line(raw, taxonomy).map_err(|e| IngestError::Line {
            line,
            source: Box::new(e),
        })?;
        if !seen.insert((entry.doc_id.clone(), entry.relation.rel_id.clone())) {
            return Err(IngestError::Line {
                line,
                source: Box::new(IngestError::DuplicateRelId(entry.relation.rel_id)),
            });
        }
        out.push(entry);
    }
    Ok(out)
}

fn parse_line(raw: &str, taxonomy: &TaxonomyTable) -> Result<PdtbEntry, IngestError> {
    let line: RelationLine = serde_json::from_str(raw).map_err(IngestError::from_json)?;
    let rel_type: RelType = line.rel_type.parse()?;
    let senses = line
        .senses
        .iter()
        .map(|s| taxonomy.resolve_pdtb(s).unwrap_or_else(|_| SenseLabel::pdtb_raw(s)))
        .collect();
    let relation = PdtbRelation::new(
        line.rel_id,
        rel_type,
        SpanSet::new(line.connective.spans),
        line.connective.text,
        senses,
        SpanSet::new(line.arg1.spans),
        SpanSet::new(line.arg2.spans),
    )?;
    Ok(PdtbEntry {
        doc_id: line.doc_id,
        relation,
    })
}

/// One JSON line per relation, in the given order.
pub fn serialize_pdtb_jsonl(doc_id: &str, relations: &[PdtbRelation]) -> String {
    let mut out = String::new();
    for r in relations {
        let line = RelationLine {
            doc_id: doc_id.to_string(),
            rel_id: r.rel_id.clone(),
            rel_type: r.rel_type.to_string(),
            connective: ConnectiveLine {
                spans: r.connective_spans.spans().to_vec(),
                text: r.connective_text.clone(),
            },
            senses: r.senses.iter().map(ToString::to_string).collect(),
            arg1: ArgLine {
                spans: r.arg1.spans().to_vec(),
            },
            arg2: ArgLine {
                spans: r.arg2.spans().to_vec(),
            },
        };
        out.push_str(&serde_json::to_string(&line).expect("relation serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_concession() {
        let src = r#"{"doc_id":"wsj_0609","rel_id":"r1","type":"Explicit","connective":{"spans":[[0,8]],"text":"although"},"senses":["Comparison.Concession.Expectation"],"arg1":{"spans":[[30,60]]},"arg2":{"spans":[[9,29]]}}"#;
        let rels = parse_pdtb_jsonl(src.as_bytes()).unwrap();
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].relation.senses[0].to_string(), "Comparison.Concession.Expectation");
        assert_eq!(rels[0].relation.connective_text, "although");
    }

    #[test]
    fn entrel_gets_synthetic_sense() {
        let src = r#"{"doc_id":"d","rel_id":"r2","type":"EntRel","connective":{"spans":[],"text":""},"senses":["EntRel"],"arg1":{"spans":[[0,10]]},"arg2":{"spans":[[11,20]]}}"#;
        let rels = parse_pdtb_jsonl(src.as_bytes()).unwrap();
        assert_eq!(rels[0].relation.rel_type, RelType::EntRel);
        assert_eq!(rels[0].relation.senses.len(), 1);
    }

    #[test]
    fn overlapping_args_rejected_with_line() {
        let src = "\n{\"doc_id\":\"d\",\"rel_id\":\"r\",\"type\":\"Implicit\",\"senses\":[\"Expansion\"],\"arg1\":{\"spans\":[[0,10]]},\"arg2\":{\"spans\":[[5,20]]}}";
        match parse_pdtb_jsonl(src.as_bytes()) {
            Err(e @ IngestError::Line { line: 2, .. }) => assert!(e.to_string().contains("argument overlap"), "{e}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_rel_id_rejected() {
        let one = r#"{"doc_id":"d","rel_id":"r","type":"Implicit","senses":["Expansion"],"arg1":{"spans":[[0,10]]},"arg2":{"spans":[[10,20]]}}"#;
        let src = format!("{one}\n{one}\n");
        match parse_pdtb_jsonl(src.as_bytes()) {
            Err(IngestError::Line { line: 2, source }) => assert!(matches!(*source, IngestError::DuplicateRelId(_))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_sense_retained() {
        let src = r#"{"doc_id":"d","rel_id":"r","type":"Implicit","senses":["Expansion.Frobnication"],"arg1":{"spans":[[0,10]]},"arg2":{"spans":[[10,20]]}}"#;
        let rels = parse_pdtb_jsonl(src.as_bytes()).unwrap();
        assert_eq!(rels[0].relation.senses[0].to_string(), "Expansion.Frobnication");
    }
}
