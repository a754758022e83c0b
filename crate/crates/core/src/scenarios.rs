//! Hand-built alignment scenarios with their expected verdicts.
//!
//! Each scenario is a small tree over EDUs `a`, `b`, ... of chosen lengths,
//! one PDTB relation, and the status, flags and label the aligner must give.

use crate::alignment::{AlignmentFlag, Status};
use crate::model::{CharSpan, NodeSpec, Nuclearity, PdtbRelation, RelType, RstTree, SpanSet};
use crate::taxonomy::SenseLabel;

use AlignmentFlag::*;
use Nuclearity::{Nucleus as N, Root, Satellite as S};

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub tree: RstTree,
    pub relation: PdtbRelation,
    pub status: Status,
    pub flags: Vec<AlignmentFlag>,
    pub label: Option<&'static str>,
}

struct Edus(Vec<CharSpan>);

impl Edus {
    fn new(lens: &[usize]) -> Self {
        let mut pos = 0;
        Edus(
            lens.iter()
                .map(|&l| {
                    let s = CharSpan::new(pos, pos + l).expect("positive length");
                    pos += l;
                    s
                })
                .collect(),
        )
    }

    fn leaf(&self, i: usize, nuc: Nuclearity, rel: &str) -> NodeSpec {
        NodeSpec::leaf(self.0[i], nuc, rel, i as u32 + 1)
    }

    /// Positions covered by EDUs `from..=to`.
    fn range(&self, from: usize, to: usize) -> SpanSet {
        SpanSet::single(CharSpan::new(self.0[from].start(), self.0[to].end()).expect("non-empty"))
    }

    fn pick(&self, idx: &[usize]) -> SpanSet {
        SpanSet::new(idx.iter().map(|&i| self.0[i]))
    }
}

fn internal(nuc: Nuclearity, rel: &str, children: Vec<NodeSpec>) -> NodeSpec {
    NodeSpec::internal(nuc, rel, children)
}

fn implicit(sense: &str, arg1: SpanSet, arg2: SpanSet) -> PdtbRelation {
    PdtbRelation::new(
        "r1",
        RelType::Implicit,
        SpanSet::default(),
        "",
        vec![SenseLabel::pdtb_raw(sense)],
        arg1,
        arg2,
    )
    .expect("valid scenario relation")
}

/// a, then Y = temporal-same-time(b, c) elaborating a, all restated by d.
fn restatement_tree(e: &Edus) -> RstTree {
    let y = internal(
        S,
        "elaboration-additional",
        vec![e.leaf(1, N, "temporal-same-time"), e.leaf(2, N, "temporal-same-time")],
    );
    let x = internal(N, "span", vec![e.leaf(0, N, "span"), y]);
    RstTree::from_spec(&internal(Root, "span", vec![x, e.leaf(3, S, "restatement")]))
}

pub fn scenarios() -> Vec<Scenario> {
    let mut out = Vec::new();

    // b is longer than a and c is long enough that no subtree beats the EDUs,
    // so an Arg1 of a+b lands on b and meets Arg2 at the same-time relation.
    let e = Edus::new(&[10, 20, 30, 15]);
    out.push(Scenario {
        name: "boundary match",
        tree: restatement_tree(&e),
        relation: implicit("Temporal.Synchrony", e.range(0, 1), e.range(2, 2)),
        status: Status::Aligned,
        flags: vec![],
        label: Some("temporal-same-time"),
    });

    // Arg1 is a alone; the restatement holds between a..c and d, and a is
    // the nucleus of a..c.
    out.push(Scenario {
        name: "nucleus path match",
        tree: restatement_tree(&e),
        relation: implicit("Expansion.Restatement", e.range(0, 0), e.range(3, 3)),
        status: Status::Aligned,
        flags: vec![],
        label: Some("restatement"),
    });

    // concession(S: a, N: list(N: attribution(S: b, N: condition(c, d)), N: e))
    let e = Edus::new(&[12, 8, 14, 10, 16]);
    let cond = internal(N, "span", vec![e.leaf(2, N, "span"), e.leaf(3, S, "condition")]);
    let attr = internal(N, "list", vec![e.leaf(1, S, "attribution"), cond]);
    let list = internal(N, "span", vec![attr, e.leaf(4, N, "list")]);
    out.push(Scenario {
        name: "intervening multinuclear list",
        tree: RstTree::from_spec(&internal(Root, "span", vec![e.leaf(0, S, "concession"), list])),
        relation: implicit("Comparison.Concession", e.range(2, 3), e.range(0, 0)),
        status: Status::Flagged,
        flags: vec![InterveningMultinuclear, InterveningAttribution(1)],
        label: Some("concession"),
    });

    // circumstance(N: elaboration-object-attribute(N: a, S: b), S: c) with
    // Arg1 = b: the nucleus path of a..b ends at a.
    let e = Edus::new(&[15, 20, 18]);
    let x = internal(
        N,
        "span",
        vec![e.leaf(0, N, "span"), e.leaf(1, S, "elaboration-object-attribute")],
    );
    out.push(Scenario {
        name: "nuclearity violation",
        tree: RstTree::from_spec(&internal(Root, "span", vec![x, e.leaf(2, S, "circumstance")])),
        relation: implicit("Temporal.Synchrony", e.range(1, 1), e.range(2, 2)),
        status: Status::Flagged,
        flags: vec![NuclearityViolation],
        label: Some("circumstance"),
    });

    // consequence(N: a, S: contrast(c1, c2)) with Arg2 on the second
    // contrast member: the satellite's nucleus is ambiguous.
    let e = Edus::new(&[20, 12, 14]);
    let z = internal(S, "consequence", vec![e.leaf(1, N, "contrast"), e.leaf(2, N, "contrast")]);
    out.push(Scenario {
        name: "multinuclear satellite",
        tree: RstTree::from_spec(&internal(Root, "span", vec![e.leaf(0, N, "span"), z])),
        relation: implicit("Comparison.Contrast", e.range(0, 0), e.range(2, 2)),
        status: Status::Flagged,
        flags: vec![InterveningMultinuclear],
        label: Some("consequence"),
    });

    // same-unit(N: elaboration-object-attribute(N: a, S: b), N: c), with
    // Arg1 = a + c wrapped around Arg2 = b.
    let e = Edus::new(&[14, 6, 16]);
    let x = internal(
        N,
        "same-unit",
        vec![e.leaf(0, N, "span"), e.leaf(1, S, "elaboration-object-attribute")],
    );
    out.push(Scenario {
        name: "same-unit resolved",
        tree: RstTree::from_spec(&internal(Root, "span", vec![x, e.leaf(2, N, "same-unit")])),
        relation: implicit("Expansion.Restatement", e.pick(&[0, 2]), e.range(1, 1)),
        status: Status::Aligned,
        flags: vec![DiscontinuousArg, CentralEmbedding, SameUnitResolved],
        label: Some("elaboration-object-attribute"),
    });

    // same-unit over two multi-EDU segments.
    let e = Edus::new(&[10, 10, 10, 10]);
    let x = internal(
        N,
        "same-unit",
        vec![e.leaf(0, N, "span"), e.leaf(1, S, "elaboration-additional")],
    );
    let y = internal(N, "same-unit", vec![e.leaf(2, N, "span"), e.leaf(3, S, "attribution")]);
    out.push(Scenario {
        name: "same-unit unresolvable",
        tree: RstTree::from_spec(&internal(Root, "span", vec![x, y])),
        relation: implicit("Expansion.Conjunction", e.range(0, 0), e.range(3, 3)),
        status: Status::Flagged,
        flags: vec![SameUnitUnresolvable],
        label: Some("same-unit"),
    });

    // Both arguments inside one EDU.
    let e = Edus::new(&[30, 20]);
    let rel = PdtbRelation::new(
        "r1",
        RelType::Explicit,
        SpanSet::single(CharSpan::new(7, 14).expect("span")),
        "because",
        vec![SenseLabel::pdtb_raw("Contingency.Cause.Reason")],
        SpanSet::single(CharSpan::new(0, 6).expect("span")),
        SpanSet::single(CharSpan::new(15, 30).expect("span")),
    )
    .expect("valid scenario relation");
    out.push(Scenario {
        name: "internal relation",
        tree: RstTree::from_spec(&internal(
            Root,
            "span",
            vec![e.leaf(0, N, "span"), e.leaf(1, S, "elaboration-additional")],
        )),
        relation: rel,
        status: Status::Unalignable,
        flags: vec![InternalRelation],
        label: None,
    });

    out
}
