use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::model::{overlap_chars, CharSpan, NodeId, RstTree, SpanSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchKind {
    #[serde(rename = "EDU")]
    Edu,
    Subtree,
}

/// Best RST node for one PDTB argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpanMatch {
    pub node: NodeId,
    pub overlap: usize,
    pub margin: usize,
    pub kind: MatchKind,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    node: NodeId,
    span: CharSpan,
    overlap: usize,
    margin: usize,
}

impl Candidate {
    fn score(&self) -> i64 {
        self.overlap as i64 - self.margin as i64
    }

    /// Higher score, then higher overlap, lower margin, shorter span, earlier start.
    fn rank(&self, other: &Candidate) -> Ordering {
        self.score()
            .cmp(&other.score())
            .then(self.overlap.cmp(&other.overlap))
            .then(other.margin.cmp(&self.margin))
            .then(other.span.len().cmp(&self.span.len()))
            .then(other.span.start().cmp(&self.span.start()))
    }
}

fn best(cands: impl Iterator<Item = Candidate>) -> Option<Candidate> {
    cands.fold(None, |acc: Option<Candidate>, c| match acc {
        Some(b) if b.rank(&c) != Ordering::Less => Some(b),
        _ => Some(c),
    })
}

/// Scores EDUs first, then lets a subtree take over only on a strictly
/// higher score. Returns `None` when the argument overlaps no EDU.
pub fn match_argument(arg: &SpanSet, tree: &RstTree) -> Option<SpanMatch> {
    match_argument_ignoring(arg, tree, &SpanSet::default())
}

/// Like [`match_argument`], with positions in `ignore` left out of margins.
pub fn match_argument_ignoring(arg: &SpanSet, tree: &RstTree, ignore: &SpanSet) -> Option<SpanMatch> {
    let candidate = |node: NodeId| {
        let span = tree.span(node);
        let set = SpanSet::single(span);
        let overlap = overlap_chars(&set, arg);
        let margin = if ignore.is_empty() {
            span.len() - overlap
        } else {
            set.difference(arg).difference(ignore).len()
        };
        Candidate {
            node,
            span,
            overlap,
            margin,
        }
    };
    let edu = best(tree.leaves().map(candidate).filter(|c| c.overlap > 0))?;
    let chosen = match best(tree.internal_nodes().map(candidate).filter(|c| c.overlap > 0)) {
        Some(sub) if sub.score() > edu.score() => sub,
        _ => edu,
    };
    Some(SpanMatch {
        node: chosen.node,
        overlap: chosen.overlap,
        margin: chosen.margin,
        kind: if tree.is_leaf(chosen.node) {
            MatchKind::Edu
        } else {
            MatchKind::Subtree
        },
    })
}
