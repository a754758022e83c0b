use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::span::CharSpan;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Nuclearity {
    Root,
    Nucleus,
    Satellite,
}

/// Relation to parent: the structural `span` sentinel or a relation label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rel2Par {
    Span,
    Label(String),
}

impl Rel2Par {
    pub fn parse(raw: &str) -> Rel2Par {
        let label = normalize_relation_label(raw);
        if label == "span" {
            Rel2Par::Span
        } else {
            Rel2Par::Label(label)
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Rel2Par::Span => "span",
            Rel2Par::Label(l) => l,
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Rel2Par::Span => None,
            Rel2Par::Label(l) => Some(l),
        }
    }
}

impl fmt::Display for Rel2Par {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Rel2Par {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Rel2Par {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Ok(Rel2Par::parse(&raw))
    }
}

/// Lower-cases a relation label and joins whitespace-separated parts with hyphens.
pub fn normalize_relation_label(raw: &str) -> String {
    raw.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join("-")
}

/// Nested node description, the shape of the canonical JSON schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub span: CharSpan,
    pub nuclearity: Nuclearity,
    pub rel2par: Rel2Par,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edu_id: Option<u32>,
}

impl NodeSpec {
    pub fn leaf(span: CharSpan, nuclearity: Nuclearity, rel2par: &str, edu_id: u32) -> Self {
        NodeSpec {
            span,
            nuclearity,
            rel2par: Rel2Par::parse(rel2par),
            children: Vec::new(),
            edu_id: Some(edu_id),
        }
    }

    /// Internal node whose span is the hull of its children.
    pub fn internal(nuclearity: Nuclearity, rel2par: &str, children: Vec<NodeSpec>) -> Self {
        let start = children.iter().map(|c| c.span.start()).min().unwrap_or(0);
        let end = children.iter().map(|c| c.span.end()).max().unwrap_or(start + 1);
        NodeSpec {
            span: CharSpan::new(start, end.max(start + 1)).expect("non-empty hull"),
            nuclearity,
            rel2par: Rel2Par::parse(rel2par),
            children,
            edu_id: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RstNode {
    pub span: CharSpan,
    pub nuclearity: Nuclearity,
    pub rel2par: Rel2Par,
    pub children: Vec<NodeId>,
    pub edu_id: Option<u32>,
    pub parent: Option<NodeId>,
    pub depth: usize,
    subtree_end: NodeId,
}

impl RstNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Arena-backed RST tree. Nodes are stored in pre-order, so the root is
/// node 0 and every subtree occupies a contiguous id range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RstTree {
    nodes: Vec<RstNode>,
    edus: Vec<(u32, CharSpan)>,
}

impl RstTree {
    pub fn from_spec(root: &NodeSpec) -> Self {
        let mut nodes = Vec::new();
        push_spec(root, None, 0, &mut nodes);
        let edus = nodes
            .iter()
            .filter(|n| n.is_leaf())
            .map(|n| (n.edu_id.unwrap_or(0), n.span))
            .collect();
        RstTree { nodes, edus }
    }

    pub fn to_spec(&self) -> NodeSpec {
        self.spec_of(self.root())
    }

    fn spec_of(&self, id: NodeId) -> NodeSpec {
        let n = &self.nodes[id];
        NodeSpec {
            span: n.span,
            nuclearity: n.nuclearity,
            rel2par: n.rel2par.clone(),
            children: n.children.iter().map(|&c| self.spec_of(c)).collect(),
            edu_id: n.edu_id,
        }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &RstNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[RstNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edus(&self) -> &[(u32, CharSpan)] {
        &self.edus
    }

    pub fn span(&self, id: NodeId) -> CharSpan {
        self.nodes[id].span
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].is_leaf()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_leaf())
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.nodes[i].is_leaf())
    }

    pub fn leaf_for_edu(&self, edu_id: u32) -> Option<NodeId> {
        self.leaves().find(|&i| self.nodes[i].edu_id == Some(edu_id))
    }

    /// True when `desc` lies in the subtree rooted at `anc` (inclusive).
    pub fn is_ancestor_or_self(&self, anc: NodeId, desc: NodeId) -> bool {
        anc <= desc && desc < self.nodes[anc].subtree_end
    }

    /// Leaves under `id` in document order.
    pub fn leaves_under(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        (id..self.nodes[id].subtree_end).filter(|&i| self.nodes[i].is_leaf())
    }

    pub fn edu_count_under(&self, id: NodeId) -> usize {
        self.leaves_under(id).count()
    }

    /// The child of `anc` whose subtree contains `desc`.
    pub fn child_towards(&self, anc: NodeId, desc: NodeId) -> Option<NodeId> {
        self.nodes[anc]
            .children
            .iter()
            .copied()
            .find(|&c| self.is_ancestor_or_self(c, desc))
    }

    pub fn nucleus_children(&self, id: NodeId) -> Vec<NodeId> {
        self.nodes[id]
            .children
            .iter()
            .copied()
            .filter(|&c| self.nodes[c].nuclearity == Nuclearity::Nucleus)
            .collect()
    }

    pub fn is_multinuclear(&self, id: NodeId) -> bool {
        self.nucleus_children(id).len() >= 2
    }

    /// Child indices leading from the root to `id`.
    pub fn path_to(&self, id: NodeId) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            let idx = self.nodes[p]
                .children
                .iter()
                .position(|&c| c == cur)
                .expect("child listed in parent");
            path.push(idx);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn node_at_path(&self, path: &[usize]) -> Option<NodeId> {
        let mut cur = self.root();
        for &i in path {
            cur = *self.nodes[cur].children.get(i)?;
        }
        Some(cur)
    }
}

fn push_spec(spec: &NodeSpec, parent: Option<NodeId>, depth: usize, nodes: &mut Vec<RstNode>) -> NodeId {
    let id = nodes.len();
    nodes.push(RstNode {
        span: spec.span,
        nuclearity: spec.nuclearity,
        rel2par: spec.rel2par.clone(),
        children: Vec::with_capacity(spec.children.len()),
        edu_id: spec.edu_id,
        parent,
        depth,
        subtree_end: id + 1,
    });
    for child in &spec.children {
        let cid = push_spec(child, Some(id), depth + 1, nodes);
        nodes[id].children.push(cid);
    }
    nodes[id].subtree_end = nodes.len();
    id
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeRule {
    LeafShape,
    TooFewChildren,
    ChildrenOverlap,
    NotTiled,
    NuclearityLabeling,
    RootLabeling,
    EduNumbering,
}

impl TreeRule {
    pub fn describe(&self) -> &'static str {
        match self {
            TreeRule::LeafShape => "leaf must carry edu_id and no children",
            TreeRule::TooFewChildren => "internal node needs at least two children",
            TreeRule::ChildrenOverlap => "children overlap",
            TreeRule::NotTiled => "children do not tile parent",
            TreeRule::NuclearityLabeling => "nuclearity labeling",
            TreeRule::RootLabeling => "root must be Root with rel2par span",
            TreeRule::EduNumbering => "edu ids must be 1..n in document order",
        }
    }
}

impl fmt::Display for TreeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub span: CharSpan,
    pub rule: TreeRule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.rule, self.span)
    }
}

/// Checks every tree invariant; children must tile their parent exactly.
pub fn validate_tree(tree: &RstTree) -> Vec<Violation> {
    validate(tree, None)
}

/// Like [`validate_tree`], but gaps between sibling spans are accepted when
/// the document text in the gap is whitespace only.
pub fn validate_tree_in(tree: &RstTree, text: &[char]) -> Vec<Violation> {
    validate(tree, Some(text))
}

fn validate(tree: &RstTree, text: Option<&[char]>) -> Vec<Violation> {
    let mut out = Vec::new();
    let root = tree.node(tree.root());
    if root.nuclearity != Nuclearity::Root || root.rel2par != Rel2Par::Span {
        out.push(Violation {
            span: root.span,
            rule: TreeRule::RootLabeling,
        });
    }
    for (id, node) in tree.nodes().iter().enumerate() {
        let v = |rule| Violation { span: node.span, rule };
        if id != tree.root() && node.nuclearity == Nuclearity::Root {
            out.push(v(TreeRule::NuclearityLabeling));
        }
        if node.is_leaf() {
            if node.edu_id.is_none() {
                out.push(v(TreeRule::LeafShape));
            }
            continue;
        }
        if node.edu_id.is_some() {
            out.push(v(TreeRule::LeafShape));
        }
        if node.children.len() < 2 {
            out.push(v(TreeRule::TooFewChildren));
        }
        check_tiling(tree, id, text, &mut out);
        if !nuclearity_ok(tree, id) {
            out.push(v(TreeRule::NuclearityLabeling));
        }
    }
    let numbered = tree.edus().iter().enumerate().all(|(i, &(edu, _))| edu as usize == i + 1);
    if !numbered {
        out.push(Violation {
            span: root.span,
            rule: TreeRule::EduNumbering,
        });
    }
    out
}

fn check_tiling(tree: &RstTree, id: NodeId, text: Option<&[char]>, out: &mut Vec<Violation>) {
    let node = tree.node(id);
    let kids: Vec<CharSpan> = node.children.iter().map(|&c| tree.span(c)).collect();
    let mut overlap = false;
    let mut gap = false;
    for w in kids.windows(2) {
        if w[1].start() < w[0].end() {
            overlap = true;
        } else if w[1].start() > w[0].end() && !whitespace_gap(text, w[0].end(), w[1].start()) {
            gap = true;
        }
    }
    if overlap {
        out.push(Violation {
            span: node.span,
            rule: TreeRule::ChildrenOverlap,
        });
    }
    let edges =
        kids.first().map(|s| s.start()) == Some(node.span.start()) && kids.last().map(|s| s.end()) == Some(node.span.end());
    if gap || (!overlap && !edges) {
        out.push(Violation {
            span: node.span,
            rule: TreeRule::NotTiled,
        });
    }
}

fn whitespace_gap(text: Option<&[char]>, from: usize, to: usize) -> bool {
    match text {
        Some(t) if to <= t.len() => t[from..to].iter().all(|c| c.is_whitespace()),
        _ => false,
    }
}

fn nuclearity_ok(tree: &RstTree, id: NodeId) -> bool {
    let kids: Vec<&RstNode> = tree.node(id).children.iter().map(|&c| tree.node(c)).collect();
    let nuclei: Vec<&&RstNode> = kids.iter().filter(|k| k.nuclearity == Nuclearity::Nucleus).collect();
    let sats: Vec<&&RstNode> = kids.iter().filter(|k| k.nuclearity == Nuclearity::Satellite).collect();
    if nuclei.len() + sats.len() != kids.len() {
        return false;
    }
    match nuclei.len() {
        0 => false,
        1 => nuclei[0].rel2par == Rel2Par::Span && !sats.is_empty() && sats.iter().all(|s| s.rel2par != Rel2Par::Span),
        _ => {
            let first = &nuclei[0].rel2par;
            sats.is_empty() && *first != Rel2Par::Span && nuclei.iter().all(|n| n.rel2par == *first)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NucleusPath {
    /// Complete descent ending at a leaf.
    Complete(Vec<NodeId>),
    /// Descent stopped at a node with more than one nucleus; carries the partial path.
    Ambiguous(Vec<NodeId>),
}

impl NucleusPath {
    pub fn nodes(&self) -> &[NodeId] {
        match self {
            NucleusPath::Complete(p) | NucleusPath::Ambiguous(p) => p,
        }
    }
}

pub fn nucleus_path(tree: &RstTree, start: NodeId) -> NucleusPath {
    let mut path = vec![start];
    let mut cur = start;
    while !tree.is_leaf(cur) {
        let nuclei = tree.nucleus_children(cur);
        if nuclei.len() != 1 {
            return NucleusPath::Ambiguous(path);
        }
        cur = nuclei[0];
        path.push(cur);
    }
    NucleusPath::Complete(path)
}
