use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::span::{overlap_chars, SpanSet};
use super::ModelError;
use crate::taxonomy::SenseLabel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelType {
    Explicit,
    Implicit,
    AltLex,
    EntRel,
    NoRel,
}

impl RelType {
    pub fn as_str(&self) -> &'static str {
        match self {
            RelType::Explicit => "Explicit",
            RelType::Implicit => "Implicit",
            RelType::AltLex => "AltLex",
            RelType::EntRel => "EntRel",
            RelType::NoRel => "NoRel",
        }
    }

    /// EntRel and NoRel carry a single synthetic sense named after the type.
    pub fn is_synthetic(&self) -> bool {
        matches!(self, RelType::EntRel | RelType::NoRel)
    }
}

impl fmt::Display for RelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "explicit" => Ok(RelType::Explicit),
            "implicit" => Ok(RelType::Implicit),
            "altlex" => Ok(RelType::AltLex),
            "entrel" => Ok(RelType::EntRel),
            "norel" => Ok(RelType::NoRel),
            _ => Err(ModelError::UnknownRelType(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdtbRelation {
    pub rel_id: String,
    pub rel_type: RelType,
    pub connective_spans: SpanSet,
    pub connective_text: String,
    pub senses: Vec<SenseLabel>,
    pub arg1: SpanSet,
    pub arg2: SpanSet,
}

impl PdtbRelation {
    pub fn new(
        rel_id: impl Into<String>,
        rel_type: RelType,
        connective_spans: SpanSet,
        connective_text: impl Into<String>,
        mut senses: Vec<SenseLabel>,
        arg1: SpanSet,
        arg2: SpanSet,
    ) -> Result<Self, ModelError> {
        if arg1.is_empty() || arg2.is_empty() {
            return Err(ModelError::EmptyArgument);
        }
        if overlap_chars(&arg1, &arg2) > 0 {
            return Err(ModelError::ArgumentOverlap);
        }
        if rel_type == RelType::Explicit && connective_spans.is_empty() {
            return Err(ModelError::MissingConnective);
        }
        if rel_type.is_synthetic() {
            if !connective_spans.is_empty() {
                return Err(ModelError::UnexpectedConnective(rel_type));
            }
            let synthetic = SenseLabel::pdtb_raw(rel_type.as_str());
            if senses.is_empty() {
                senses.push(synthetic.clone());
            }
            if senses != [synthetic] {
                return Err(ModelError::SenseCount(rel_type));
            }
        } else if senses.is_empty() || senses.len() > 2 {
            return Err(ModelError::SenseCount(rel_type));
        }
        Ok(PdtbRelation {
            rel_id: rel_id.into(),
            rel_type,
            connective_spans,
            connective_text: connective_text.into(),
            senses,
            arg1,
            arg2,
        })
    }

    pub fn max_end(&self) -> usize {
        [&self.arg1, &self.arg2, &self.connective_spans]
            .iter()
            .filter_map(|s| s.max_end())
            .max()
            .unwrap_or(0)
    }
}
