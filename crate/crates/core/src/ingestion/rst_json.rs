use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::{validate_tree, validate_tree_in, NodeSpec, RstTree};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RstFile {
    pub doc_id: String,
    pub root: NodeSpec,
}

fn parse_file(bytes: &[u8]) -> Result<RstFile, IngestError> {
    serde_json::from_slice(bytes).map_err(IngestError::from_json)
}

/// Parses and strictly validates a canonical RST JSON tree.
pub fn parse_rst_json(bytes: &[u8]) -> Result<RstTree, IngestError> {
    let file = parse_file(bytes)?;
    let tree = RstTree::from_spec(&file.root);
    check(validate_tree(&tree))?;
    Ok(tree)
}

/// Parses an RST JSON tree, accepting whitespace-only gaps between siblings.
pub fn parse_rst_json_in(bytes: &[u8], text: &str) -> Result<(String, RstTree), IngestError> {
    let file = parse_file(bytes)?;
    let tree = RstTree::from_spec(&file.root);
    let chars: Vec<char> = text.chars().collect();
    check(validate_tree_in(&tree, &chars))?;
    Ok((file.doc_id, tree))
}

pub(super) fn check(violations: Vec<crate::model::Violation>) -> Result<(), IngestError> {
    match violations.into_iter().next() {
        Some(v) => Err(IngestError::Semantic(v.to_string())),
        None => Ok(()),
    }
}

pub fn serialize_rst_json(doc_id: &str, tree: &RstTree) -> String {
    let file = RstFile {
        doc_id: doc_id.to_string(),
        root: tree.to_spec(),
    };
    serde_json::to_string_pretty(&file).expect("tree serializes")
}
