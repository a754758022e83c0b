use thiserror::Error;

use crate::model::{NodeId, Nuclearity, RstTree};
use crate::taxonomy::SenseLabel;

pub const SAME_UNIT: &str = "same-unit";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("leaf node expresses no relation")]
    Leaf,
    #[error("inconsistent multinuclear labels")]
    InconsistentMultinuclear,
    #[error("satellites carry different relation labels")]
    MixedSatellites,
    #[error("node has no nucleus")]
    NoNucleus,
}

/// Deepest node with `a` and `b` under different children; `None` when they
/// are equal or nested.
pub fn lowest_common_relation(tree: &RstTree, a: NodeId, b: NodeId) -> Option<NodeId> {
    if tree.is_ancestor_or_self(a, b) || tree.is_ancestor_or_self(b, a) {
        return None;
    }
    let mut cur = tree.node(a).parent;
    while let Some(p) = cur {
        if tree.is_ancestor_or_self(p, b) {
            return Some(p);
        }
        cur = tree.node(p).parent;
    }
    None
}

/// Label of the relation a node expresses.
pub fn relation_label_at(tree: &RstTree, node: NodeId) -> Result<SenseLabel, RelationError> {
    let n = tree.node(node);
    if n.is_leaf() {
        return Err(RelationError::Leaf);
    }
    let nuclei = tree.nucleus_children(node);
    let labels = |ids: &[NodeId]| -> Vec<String> { ids.iter().map(|&c| tree.node(c).rel2par.as_str().to_string()).collect() };
    let label = match nuclei.len() {
        0 => return Err(RelationError::NoNucleus),
        1 => {
            let sats: Vec<NodeId> = n
                .children
                .iter()
                .copied()
                .filter(|&c| tree.node(c).nuclearity == Nuclearity::Satellite)
                .collect();
            let l = labels(&sats);
            match l.first() {
                Some(first) if l.iter().all(|x| x == first) => first.clone(),
                Some(_) => return Err(RelationError::MixedSatellites),
                None => return Err(RelationError::NoNucleus),
            }
        }
        _ => {
            let l = labels(&nuclei);
            if l.iter().any(|x| *x != l[0]) {
                return Err(RelationError::InconsistentMultinuclear);
            }
            l[0].clone()
        }
    };
    Ok(SenseLabel::rst_raw(&label))
}

pub fn is_same_unit(tree: &RstTree, node: NodeId) -> bool {
    relation_label_at(tree, node).is_ok_and(|l| l.segments()[0] == SAME_UNIT)
}

pub fn is_attribution_label(label: &str) -> bool {
    label == "attribution" || label == "attribution-negative"
}

fn is_attribution_node(tree: &RstTree, node: NodeId) -> bool {
    tree.nucleus_children(node).len() == 1
        && tree.node(node).children.iter().any(|&c| {
            let ch = tree.node(c);
            ch.nuclearity == Nuclearity::Satellite && is_attribution_label(ch.rel2par.as_str())
        })
}

/// What following the nucleus path from a side child towards a matched node found.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NuclearityCheck {
    /// The path left the matched span and ended at a disjoint leaf.
    pub exits: bool,
    /// Multinuclear relations passed before reaching the matched span.
    pub multinuclear: u32,
    /// Attribution relations crossed on the path.
    pub attributions: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NuclearityOutcome {
    Ok,
    NuclearityViolation,
    InterveningMultinuclear(u32),
}

impl NuclearityCheck {
    pub fn outcome(&self) -> NuclearityOutcome {
        if self.exits {
            NuclearityOutcome::NuclearityViolation
        } else if self.multinuclear > 0 {
            NuclearityOutcome::InterveningMultinuclear(self.multinuclear)
        } else {
            NuclearityOutcome::Ok
        }
    }
}

/// Follows the nucleus path from `side_child` (a child of `lcr`) towards `matched`.
pub fn check_nuclearity(tree: &RstTree, lcr: NodeId, matched: NodeId, side_child: NodeId) -> NuclearityCheck {
    debug_assert_eq!(tree.node(side_child).parent, Some(lcr));
    let target = tree.span(matched);
    let mut check = NuclearityCheck::default();
    let mut cur = side_child;
    loop {
        if cur == matched || target.contains(&tree.span(cur)) {
            return check;
        }
        if !tree.is_ancestor_or_self(cur, matched) {
            let mut leaf = cur;
            while !tree.is_leaf(leaf) {
                leaf = match tree.nucleus_children(leaf).first() {
                    Some(&n) => n,
                    None => tree.node(leaf).children[0],
                };
            }
            check.exits = !tree.span(leaf).intersects(&target);
            return check;
        }
        if is_attribution_node(tree, cur) {
            check.attributions += 1;
        }
        let nuclei = tree.nucleus_children(cur);
        cur = if nuclei.len() == 1 {
            nuclei[0]
        } else {
            if !is_same_unit(tree, cur) {
                check.multinuclear += 1;
            }
            tree.child_towards(cur, matched).expect("matched lies below cur")
        };
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SameUnitResolution {
    Resolved { label: SenseLabel, via: NodeId },
    Unresolvable,
}

/// Label of the relation underneath a Same-unit node.
pub fn resolve_same_unit(tree: &RstTree, node: NodeId) -> SameUnitResolution {
    let multi: Vec<NodeId> = tree
        .node(node)
        .children
        .iter()
        .copied()
        .filter(|&c| !tree.is_leaf(c))
        .collect();
    match multi.len() {
        0 => {
            let Some(parent) = tree.node(node).parent else {
                return SameUnitResolution::Unresolvable;
            };
            let own = &tree.node(node).rel2par;
            let label = match (tree.node(node).nuclearity, own.label()) {
                (Nuclearity::Satellite, Some(l)) => Ok(SenseLabel::rst_raw(l)),
                _ => relation_label_at(tree, parent),
            };
            match label {
                Ok(label) => SameUnitResolution::Resolved { label, via: parent },
                Err(_) => SameUnitResolution::Unresolvable,
            }
        }
        1 => {
            let seg = multi[0];
            if is_same_unit(tree, seg) {
                return resolve_same_unit(tree, seg);
            }
            match relation_label_at(tree, seg) {
                Ok(label) => SameUnitResolution::Resolved { label, via: seg },
                Err(_) => SameUnitResolution::Unresolvable,
            }
        }
        _ => SameUnitResolution::Unresolvable,
    }
}
