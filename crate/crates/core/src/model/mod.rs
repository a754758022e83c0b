//! Documents, character spans, RST trees and PDTB relations.
//!
//! All offsets count Unicode scalar values of the document text, not bytes.

mod pdtb;
mod rst;
mod span;

use thiserror::Error;

pub use pdtb::{PdtbRelation, RelType};
pub use rst::{
    normalize_relation_label, nucleus_path, validate_tree, validate_tree_in, NodeId, NodeSpec, Nuclearity, NucleusPath, Rel2Par,
    RstNode, RstTree, TreeRule, Violation,
};
pub use span::{margin_chars, overlap_chars, CharSpan, SpanSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("empty span [{start},{end})")]
    EmptySpan { start: usize, end: usize },
    #[error("argument has no spans")]
    EmptyArgument,
    #[error("argument overlap")]
    ArgumentOverlap,
    #[error("explicit relation without connective spans")]
    MissingConnective,
    #[error("{0} relation must not carry connective spans")]
    UnexpectedConnective(RelType),
    #[error("wrong number of senses for {0} relation")]
    SenseCount(RelType),
    #[error("unknown relation type {0:?}")]
    UnknownRelType(String),
    #[error("span out of bounds: offset {end} exceeds text length {len}")]
    SpanOutOfBounds { end: usize, len: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    pub rst: RstTree,
    pub pdtb: Vec<PdtbRelation>,
}

impl Document {
    /// Builds a document after checking that every span fits inside the text.
    pub fn new(
        doc_id: impl Into<String>,
        text: impl Into<String>,
        rst: RstTree,
        pdtb: Vec<PdtbRelation>,
    ) -> Result<Self, ModelError> {
        let text = text.into();
        let len = text.chars().count();
        let rst_end = rst.nodes().iter().map(|n| n.span.end()).max().unwrap_or(0);
        let rel_end = pdtb.iter().map(PdtbRelation::max_end).max().unwrap_or(0);
        let end = rst_end.max(rel_end);
        if end > len {
            return Err(ModelError::SpanOutOfBounds { end, len });
        }
        Ok(Document {
            doc_id: doc_id.into(),
            text,
            rst,
            pdtb,
        })
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    /// Text covered by a span, by character offsets.
    pub fn slice(&self, span: CharSpan) -> String {
        self.text.chars().skip(span.start()).take(span.len()).collect()
    }
}
