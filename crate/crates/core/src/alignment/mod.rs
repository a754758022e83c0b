//! Aligns each PDTB relation to the RST relation joining its two arguments.
//!
//! Each argument is matched to the best-scoring EDU or subtree, the lowest
//! relation separating the two matches supplies the label, and nucleus paths
//! from that relation down to the matches decide whether the label can be
//! trusted.

mod matching;
mod structure;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{CharSpan, Document, Nuclearity, PdtbRelation, RelType, RstTree, SpanSet};
use crate::taxonomy::SenseLabel;

pub use matching::{match_argument, match_argument_ignoring, MatchKind, SpanMatch};
pub use structure::{
    check_nuclearity, is_attribution_label, is_same_unit, lowest_common_relation, relation_label_at, resolve_same_unit,
    NuclearityCheck, NuclearityOutcome, RelationError, SameUnitResolution, SAME_UNIT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlignmentFlag {
    DiscontinuousArg,
    CentralEmbedding,
    NoRstMatch,
    InternalRelation,
    NuclearityViolation,
    InterveningMultinuclear,
    SameUnitResolved,
    SameUnitUnresolvable,
    InterveningAttribution(u32),
}

impl AlignmentFlag {
    /// Flags that keep a relation out of the mapping analysis.
    pub fn is_excluding(&self) -> bool {
        matches!(
            self,
            AlignmentFlag::NuclearityViolation
                | AlignmentFlag::InterveningMultinuclear
                | AlignmentFlag::SameUnitUnresolvable
                | AlignmentFlag::NoRstMatch
                | AlignmentFlag::InternalRelation
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlignmentFlag::DiscontinuousArg => "DiscontinuousArg",
            AlignmentFlag::CentralEmbedding => "CentralEmbedding",
            AlignmentFlag::NoRstMatch => "NoRstMatch",
            AlignmentFlag::InternalRelation => "InternalRelation",
            AlignmentFlag::NuclearityViolation => "NuclearityViolation",
            AlignmentFlag::InterveningMultinuclear => "InterveningMultinuclear",
            AlignmentFlag::SameUnitResolved => "SameUnitResolved",
            AlignmentFlag::SameUnitUnresolvable => "SameUnitUnresolvable",
            AlignmentFlag::InterveningAttribution(_) => "InterveningAttribution",
        }
    }

    pub const NAMES: [&'static str; 9] = [
        "DiscontinuousArg",
        "CentralEmbedding",
        "NoRstMatch",
        "InternalRelation",
        "NuclearityViolation",
        "InterveningMultinuclear",
        "SameUnitResolved",
        "SameUnitUnresolvable",
        "InterveningAttribution",
    ];
}

impl fmt::Display for AlignmentFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlignmentFlag::InterveningAttribution(n) => write!(f, "InterveningAttribution({n})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    Aligned,
    Flagged,
    Unalignable,
}

/// Serialized form of a [`SpanMatch`], addressing the node by child indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub node_path: Vec<usize>,
    pub span: CharSpan,
    pub overlap: usize,
    pub margin: usize,
    pub kind: MatchKind,
}

impl MatchRecord {
    fn from_match(tree: &RstTree, m: &SpanMatch) -> Self {
        MatchRecord {
            node_path: tree.path_to(m.node),
            span: tree.span(m.node),
            overlap: m.overlap,
            margin: m.margin,
            kind: m.kind,
        }
    }
}

/// Verdict for one PDTB relation, with the relation fields later stages need.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentRecord {
    pub doc_id: String,
    pub rel_id: String,
    pub rel_type: RelType,
    pub connective: String,
    #[serde(serialize_with = "ser_labels", deserialize_with = "de_pdtb_labels")]
    pub senses: Vec<SenseLabel>,
    pub status: Status,
    #[serde(serialize_with = "ser_opt_label", deserialize_with = "de_rst_label")]
    pub rst_label: Option<SenseLabel>,
    pub rst_node_path: Option<Vec<usize>>,
    pub arg1_match: Option<MatchRecord>,
    pub arg2_match: Option<MatchRecord>,
    pub flags: Vec<AlignmentFlag>,
    pub in_analysis: bool,
}

fn ser_labels<S: Serializer>(v: &[SenseLabel], s: S) -> Result<S::Ok, S::Error> {
    v.serialize(s)
}

fn ser_opt_label<S: Serializer>(v: &Option<SenseLabel>, s: S) -> Result<S::Ok, S::Error> {
    v.serialize(s)
}

fn de_pdtb_labels<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<SenseLabel>, D::Error> {
    Ok(Vec::<String>::deserialize(d)?
        .iter()
        .map(|s| SenseLabel::pdtb_raw(s))
        .collect())
}

fn de_rst_label<'de, D: Deserializer<'de>>(d: D) -> Result<Option<SenseLabel>, D::Error> {
    Ok(Option::<String>::deserialize(d)?.map(|s| SenseLabel::rst_raw(&s)))
}

impl AlignmentRecord {
    pub fn has_flag(&self, name: &str) -> bool {
        self.flags.iter().any(|f| f.name().eq_ignore_ascii_case(name))
    }

    /// Both arguments match single EDUs with at most two extra characters.
    pub fn is_direct(&self) -> bool {
        [&self.arg1_match, &self.arg2_match]
            .iter()
            .all(|m| m.as_ref().is_some_and(|m| m.kind == MatchKind::Edu && m.margin <= 2))
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlignConfig {
    /// Leave connective characters next to an argument out of matching.
    pub strip_connective: bool,
    /// Largest gap, in characters, between a connective and an argument that still counts as adjacent.
    pub connective_gap: usize,
    /// Leave whitespace out of overlap and margin counts.
    pub ignore_whitespace: bool,
    /// Let Flagged records with a usable label enter the mapping analysis.
    pub include_flagged: bool,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            strip_connective: true,
            connective_gap: 1,
            ignore_whitespace: false,
            include_flagged: false,
        }
    }
}

/// Connective spans touching an argument boundary, widened over the gap.
fn adjacent_connective(rel: &PdtbRelation, gap: usize) -> SpanSet {
    let mut out = Vec::new();
    for c in rel.connective_spans.spans() {
        for s in rel.arg1.spans().iter().chain(rel.arg2.spans()) {
            if c.intersects(s) {
                out.push(*c);
            } else if c.end() <= s.start() && s.start() - c.end() <= gap {
                out.push(CharSpan::new(c.start(), s.start()).expect("non-empty"));
            } else if s.end() <= c.start() && c.start() - s.end() <= gap {
                out.push(CharSpan::new(s.end(), c.end()).expect("non-empty"));
            }
        }
    }
    SpanSet::new(out)
}

fn hull_contains(outer: &SpanSet, inner: &SpanSet) -> bool {
    match (outer.hull(), inner.hull()) {
        (Some(h), Some(i)) => h.contains(&i),
        _ => false,
    }
}

pub fn align_relation(rel: &PdtbRelation, tree: &RstTree) -> AlignmentRecord {
    align_relation_with(rel, tree, &AlignConfig::default(), &SpanSet::default())
}

/// Aligns one relation; `ignore` lists extra positions to leave out of matching.
pub fn align_relation_with(rel: &PdtbRelation, tree: &RstTree, config: &AlignConfig, ignore: &SpanSet) -> AlignmentRecord {
    let mut flags = Vec::new();
    if rel.arg1.is_discontinuous() || rel.arg2.is_discontinuous() {
        flags.push(AlignmentFlag::DiscontinuousArg);
    }
    if hull_contains(&rel.arg1, &rel.arg2) || hull_contains(&rel.arg2, &rel.arg1) {
        flags.push(AlignmentFlag::CentralEmbedding);
    }
    let ignore = if config.strip_connective {
        ignore.union(&adjacent_connective(rel, config.connective_gap))
    } else {
        ignore.clone()
    };
    let stripped = |arg: &SpanSet| {
        let s = arg.difference(&ignore);
        if s.is_empty() {
            arg.clone()
        } else {
            s
        }
    };
    let m1 = match_argument_ignoring(&stripped(&rel.arg1), tree, &ignore);
    let m2 = match_argument_ignoring(&stripped(&rel.arg2), tree, &ignore);

    let mut record = AlignmentRecord {
        doc_id: String::new(),
        rel_id: rel.rel_id.clone(),
        rel_type: rel.rel_type,
        connective: rel.connective_text.clone(),
        senses: rel.senses.clone(),
        status: Status::Unalignable,
        rst_label: None,
        rst_node_path: None,
        arg1_match: m1.as_ref().map(|m| MatchRecord::from_match(tree, m)),
        arg2_match: m2.as_ref().map(|m| MatchRecord::from_match(tree, m)),
        flags: Vec::new(),
        in_analysis: false,
    };
    let mut attribution_lcr = false;
    let (label, node) = match (m1, m2) {
        (Some(m1), Some(m2)) => {
            let outcome = label_for(tree, m1.node, m2.node, &mut flags);
            if let Some((label, _)) = &outcome {
                attribution_lcr = is_attribution_label(&label.segments()[0]);
            }
            match outcome {
                Some((l, n)) => (Some(l), Some(n)),
                None => (None, None),
            }
        }
        _ => {
            flags.push(AlignmentFlag::NoRstMatch);
            (None, None)
        }
    };
    flags.sort();
    flags.dedup();
    let excluded = flags.iter().any(AlignmentFlag::is_excluding);
    record.status = match &label {
        None => Status::Unalignable,
        Some(_) if excluded || attribution_lcr => Status::Flagged,
        Some(_) => Status::Aligned,
    };
    let usable = label.as_ref().is_some_and(|l| l.segments()[0] != SAME_UNIT) && !attribution_lcr;
    record.in_analysis =
        record.status == Status::Aligned || (config.include_flagged && record.status == Status::Flagged && usable);
    record.rst_label = label;
    record.rst_node_path = node.map(|n| tree.path_to(n));
    record.flags = flags;
    record
}

/// Resolves the label between two matched nodes, pushing flags as it goes.
/// Returns the label and the node it was read from.
fn label_for(tree: &RstTree, n1: usize, n2: usize, flags: &mut Vec<AlignmentFlag>) -> Option<(SenseLabel, usize)> {
    if n1 == n2 {
        flags.push(AlignmentFlag::InternalRelation);
        return None;
    }
    let nested = if tree.is_ancestor_or_self(n1, n2) {
        Some(n1)
    } else if tree.is_ancestor_or_self(n2, n1) {
        Some(n2)
    } else {
        None
    };
    if let Some(container) = nested {
        if is_same_unit(tree, container) {
            return same_unit(tree, container, flags);
        }
        flags.push(AlignmentFlag::InternalRelation);
        return None;
    }
    let lcr = lowest_common_relation(tree, n1, n2)?;
    if is_same_unit(tree, lcr) {
        return same_unit(tree, lcr, flags);
    }
    let c1 = tree.child_towards(lcr, n1)?;
    let c2 = tree.child_towards(lcr, n2)?;
    let (r1, r2) = (tree.node(c1), tree.node(c2));
    let label = match (r1.nuclearity, r2.nuclearity) {
        (Nuclearity::Satellite, Nuclearity::Satellite) => {
            flags.push(AlignmentFlag::NuclearityViolation);
            return None;
        }
        (Nuclearity::Satellite, _) => Some(SenseLabel::rst_raw(r1.rel2par.as_str())),
        (_, Nuclearity::Satellite) => Some(SenseLabel::rst_raw(r2.rel2par.as_str())),
        _ => relation_label_at(tree, lcr).ok(),
    };
    let Some(label) = label else {
        flags.push(AlignmentFlag::NuclearityViolation);
        return None;
    };
    let mut attributions = 0;
    for (side, matched) in [(c1, n1), (c2, n2)] {
        let check = check_nuclearity(tree, lcr, matched, side);
        if check.exits {
            flags.push(AlignmentFlag::NuclearityViolation);
        }
        if check.multinuclear > 0 {
            flags.push(AlignmentFlag::InterveningMultinuclear);
        }
        attributions += check.attributions;
    }
    if attributions > 0 {
        flags.push(AlignmentFlag::InterveningAttribution(attributions));
    }
    Some((label, lcr))
}

fn same_unit(tree: &RstTree, node: usize, flags: &mut Vec<AlignmentFlag>) -> Option<(SenseLabel, usize)> {
    match resolve_same_unit(tree, node) {
        SameUnitResolution::Resolved { label, .. } => {
            flags.push(AlignmentFlag::SameUnitResolved);
            Some((label, node))
        }
        SameUnitResolution::Unresolvable => {
            flags.push(AlignmentFlag::SameUnitUnresolvable);
            Some((SenseLabel::rst_raw(SAME_UNIT), node))
        }
    }
}

fn whitespace_set(text: &str) -> SpanSet {
    let spans = text
        .chars()
        .enumerate()
        .filter(|(_, c)| c.is_whitespace())
        .map(|(i, _)| CharSpan::new(i, i + 1).expect("unit span"));
    SpanSet::new(spans)
}

/// Aligns every relation of a document, in (rel_id) order.
pub fn align_document(doc: &Document, config: &AlignConfig) -> Vec<AlignmentRecord> {
    let ignore = if config.ignore_whitespace {
        whitespace_set(&doc.text)
    } else {
        SpanSet::default()
    };
    let mut out: Vec<AlignmentRecord> = doc
        .pdtb
        .iter()
        .map(|rel| {
            let mut r = align_relation_with(rel, &doc.rst, config, &ignore);
            r.doc_id = doc.doc_id.clone();
            r
        })
        .collect();
    out.sort_by(|a, b| a.rel_id.cmp(&b.rel_id));
    out
}

/// Aligns documents in parallel; output is ordered by (doc_id, rel_id).
pub fn align_corpus(docs: &[Document], config: &AlignConfig) -> Vec<AlignmentRecord> {
    let mut out: Vec<AlignmentRecord> = docs.par_iter().flat_map_iter(|d| align_document(d, config)).collect();
    out.sort_by(|a, b| (&a.doc_id, &a.rel_id).cmp(&(&b.doc_id, &b.rel_id)));
    out
}

/// Reads aligned JSONL back into records.
pub fn parse_aligned_jsonl(src: &str) -> Result<Vec<AlignmentRecord>, String> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

#[cfg(test)]
mod tests;
