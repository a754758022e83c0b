use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::{NodeSpec, Rel2Par, RelType};
use crate::scenarios::scenarios;
use crate::synth::{generate_corpus, random_tree_seeded};
use crate::taxonomy::SenseLabel;

use Nuclearity::{Nucleus as N, Root, Satellite as S};

fn sp(s: usize, e: usize) -> CharSpan {
    CharSpan::new(s, e).unwrap()
}

fn set(pairs: &[(usize, usize)]) -> SpanSet {
    SpanSet::from_pairs(pairs).unwrap()
}

fn leaf(s: usize, e: usize, nuc: Nuclearity, rel: &str, id: u32) -> NodeSpec {
    NodeSpec::leaf(sp(s, e), nuc, rel, id)
}

fn rel(arg1: SpanSet, arg2: SpanSet) -> PdtbRelation {
    PdtbRelation::new(
        "r1",
        RelType::Implicit,
        SpanSet::default(),
        "",
        vec![SenseLabel::pdtb_raw("Expansion")],
        arg1,
        arg2,
    )
    .unwrap()
}

/// a=[0,10) b=[10,20) c=[20,35) d=[35,50); root = elaboration(N: a, S: condition(N: b, S: list(c, d)))
fn sample() -> RstTree {
    let list = NodeSpec::internal(S, "condition", vec![leaf(20, 35, N, "list", 3), leaf(35, 50, N, "list", 4)]);
    let cond = NodeSpec::internal(S, "elaboration-additional", vec![leaf(10, 20, N, "span", 2), list]);
    RstTree::from_spec(&NodeSpec::internal(Root, "span", vec![leaf(0, 10, N, "span", 1), cond]))
}

#[test]
fn exact_edu_match() {
    let t = sample();
    let m = match_argument(&set(&[(10, 20)]), &t).unwrap();
    assert_eq!(
        (t.span(m.node), m.overlap, m.margin, m.kind),
        (sp(10, 20), 10, 0, MatchKind::Edu)
    );
}

#[test]
fn subtree_upgrade() {
    let t = sample();
    let m = match_argument(&set(&[(20, 50)]), &t).unwrap();
    assert_eq!((t.span(m.node), m.kind), (sp(20, 50), MatchKind::Subtree));
}

#[test]
fn no_overlap_no_match() {
    assert_eq!(match_argument(&set(&[(60, 70)]), &sample()), None);
}

#[test]
fn lcr_examples() {
    let t = sample();
    let [a, b, c, d] = [1, 2, 3, 4].map(|e| t.leaf_for_edu(e).unwrap());
    assert_eq!(lowest_common_relation(&t, c, d), t.node(d).parent);
    assert_eq!(lowest_common_relation(&t, a, c), Some(t.root()));
    assert_eq!(lowest_common_relation(&t, b, b), None);
    let list = t.node(c).parent.unwrap();
    assert_eq!(lowest_common_relation(&t, list, c), None);
}

#[test]
fn relation_labels() {
    let t = sample();
    let c = t.leaf_for_edu(3).unwrap();
    let list = t.node(c).parent.unwrap();
    assert_eq!(relation_label_at(&t, t.root()).unwrap().to_string(), "elaboration-additional");
    assert_eq!(relation_label_at(&t, list).unwrap().to_string(), "list");
    assert_eq!(relation_label_at(&t, c), Err(RelationError::Leaf));

    let bad = NodeSpec::internal(Root, "span", vec![leaf(0, 5, N, "list", 1), leaf(5, 9, N, "contrast", 2)]);
    let err = relation_label_at(&RstTree::from_spec(&bad), 0).unwrap_err();
    assert_eq!(err.to_string(), "inconsistent multinuclear labels");
}

#[test]
fn nuclearity_checks() {
    let t = sample();
    let [a, b, c, d] = [1, 2, 3, 4].map(|e| t.leaf_for_edu(e).unwrap());
    let cond = t.node(b).parent.unwrap();
    assert_eq!(check_nuclearity(&t, t.root(), a, a).outcome(), NuclearityOutcome::Ok);
    assert_eq!(check_nuclearity(&t, t.root(), b, cond).outcome(), NuclearityOutcome::Ok);
    assert_eq!(
        check_nuclearity(&t, t.root(), c, cond).outcome(),
        NuclearityOutcome::NuclearityViolation
    );
    let list = t.node(d).parent.unwrap();
    assert_eq!(
        check_nuclearity(&t, cond, d, list).outcome(),
        NuclearityOutcome::InterveningMultinuclear(1)
    );
}

#[test]
fn same_unit_resolution() {
    // same-unit(a, elaboration(b, c))
    let inner = NodeSpec::internal(
        N,
        "same-unit",
        vec![leaf(4, 8, N, "span", 2), leaf(8, 12, S, "elaboration-additional", 3)],
    );
    let t = RstTree::from_spec(&NodeSpec::internal(Root, "span", vec![leaf(0, 4, N, "same-unit", 1), inner]));
    assert!(is_same_unit(&t, 0));
    match resolve_same_unit(&t, 0) {
        SameUnitResolution::Resolved { label, .. } => assert_eq!(label.to_string(), "elaboration-additional"),
        other => panic!("{other:?}"),
    }

    // attribution(S: x, N: same-unit(a, b)): the relation around the unit.
    let su = NodeSpec::internal(N, "span", vec![leaf(4, 8, N, "same-unit", 2), leaf(8, 12, N, "same-unit", 3)]);
    let t = RstTree::from_spec(&NodeSpec::internal(Root, "span", vec![leaf(0, 4, S, "attribution", 1), su]));
    match resolve_same_unit(&t, 2) {
        SameUnitResolution::Resolved { label, .. } => assert_eq!(label.to_string(), "attribution"),
        other => panic!("{other:?}"),
    }

    // both segments multi-EDU
    let x = NodeSpec::internal(N, "same-unit", vec![leaf(0, 4, N, "span", 1), leaf(4, 8, S, "condition", 2)]);
    let y = NodeSpec::internal(
        N,
        "same-unit",
        vec![leaf(8, 12, N, "span", 3), leaf(12, 16, S, "condition", 4)],
    );
    let t = RstTree::from_spec(&NodeSpec::internal(Root, "span", vec![x, y]));
    assert_eq!(resolve_same_unit(&t, 0), SameUnitResolution::Unresolvable);
}

#[test]
fn exact_siblings_align_cleanly() {
    let t = sample();
    let r = align_relation(&rel(set(&[(0, 10)]), set(&[(10, 20)])), &t);
    assert_eq!(r.status, Status::Aligned);
    assert!(r.flags.is_empty());
    assert_eq!(r.rst_label.unwrap().to_string(), "elaboration-additional");
    assert!(r.in_analysis);
}

#[test]
fn no_match_is_unalignable() {
    let t = sample();
    let r = align_relation(&rel(set(&[(0, 10)]), set(&[(60, 70)])), &t);
    assert_eq!((r.status, r.flags), (Status::Unalignable, vec![AlignmentFlag::NoRstMatch]));
}

#[test]
fn attribution_as_lcr_is_flagged() {
    let t = RstTree::from_spec(&NodeSpec::internal(
        Root,
        "span",
        vec![leaf(0, 10, S, "attribution", 1), leaf(10, 30, N, "span", 2)],
    ));
    let r = align_relation(&rel(set(&[(0, 10)]), set(&[(10, 30)])), &t);
    assert_eq!(r.status, Status::Flagged);
    assert_eq!(r.rst_label.unwrap().to_string(), "attribution");
    assert!(r.flags.is_empty());
    assert!(!r.in_analysis);
}

#[test]
fn connective_is_stripped_before_matching() {
    // "Prices fell because costs rose." with EDUs [0,12) and [12,31)
    let t = RstTree::from_spec(&NodeSpec::internal(
        Root,
        "span",
        vec![leaf(0, 12, N, "span", 1), leaf(12, 31, S, "explanation-argumentative", 2)],
    ));
    let r = PdtbRelation::new(
        "r1",
        RelType::Explicit,
        set(&[(12, 19)]),
        "because",
        vec![SenseLabel::pdtb_raw("Contingency.Cause.Reason")],
        set(&[(0, 11)]),
        set(&[(20, 31)]),
    )
    .unwrap();
    let rec = align_relation(&r, &t);
    let m2 = rec.arg2_match.as_ref().unwrap();
    assert_eq!((m2.margin, m2.kind), (0, MatchKind::Edu));
    assert!(rec.is_direct());
    let plain = align_relation_with(
        &r,
        &t,
        &AlignConfig {
            strip_connective: false,
            ..AlignConfig::default()
        },
        &SpanSet::default(),
    );
    assert_eq!(plain.arg2_match.unwrap().margin, 8);
}

#[test]
fn include_flagged_widens_analysis() {
    for s in scenarios().iter().filter(|s| s.status == Status::Flagged) {
        let cfg = AlignConfig {
            include_flagged: true,
            ..AlignConfig::default()
        };
        let r = align_relation_with(&s.relation, &s.tree, &cfg, &SpanSet::default());
        assert_eq!(r.in_analysis, s.label != Some(SAME_UNIT), "{}", s.name);
    }
}

#[test]
fn scenarios_give_documented_verdicts() {
    for s in scenarios() {
        let r = align_relation(&s.relation, &s.tree);
        assert_eq!(r.status, s.status, "{}", s.name);
        assert_eq!(r.flags, s.flags, "{}", s.name);
        assert_eq!(
            r.rst_label.as_ref().map(ToString::to_string).as_deref(),
            s.label,
            "{}",
            s.name
        );
    }
}

#[test]
fn record_json_round_trip() {
    for s in scenarios() {
        let r = align_relation(&s.relation, &s.tree);
        let line = r.to_json_line();
        assert!(line.starts_with("{\"doc_id\""));
        let back = parse_aligned_jsonl(&line).unwrap();
        assert_eq!(back, vec![r]);
    }
}

#[test]
fn corpus_alignment_is_ordered_and_deterministic() {
    let docs: Vec<Document> = generate_corpus(11, 6)
        .into_iter()
        .map(|d| Document::new(d.doc_id, d.text, d.tree, d.relations).unwrap())
        .collect();
    let mut reversed = docs.clone();
    reversed.reverse();
    let a = align_corpus(&docs, &AlignConfig::default());
    let b = align_corpus(&reversed, &AlignConfig::default());
    let serial: Vec<AlignmentRecord> = docs.iter().flat_map(|d| align_document(d, &AlignConfig::default())).collect();
    assert_eq!(a, b);
    assert_eq!(a, serial);
    let keys: Vec<(&str, &str)> = a.iter().map(|r| (r.doc_id.as_str(), r.rel_id.as_str())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[path = "../../tests/oracles/mod.rs"]
mod oracles;
use oracles::{brute_lcr, brute_match};

fn random_arg(rng: &mut impl Rng, limit: usize) -> SpanSet {
    let n = rng.random_range(1..=3);
    SpanSet::new((0..n).map(|_| {
        let s = rng.random_range(0..limit);
        let e = rng.random_range(s + 1..=limit);
        sp(s, e)
    }))
}

/// Follows nucleus paths from the LCR's side children; a same-unit node is
/// crossed towards the match, any other multinuclear node fails.
fn path_reaches(t: &RstTree, side: usize, matched: usize) -> bool {
    let target = t.span(matched);
    let mut cur = side;
    loop {
        match crate::model::nucleus_path(t, cur) {
            crate::model::NucleusPath::Complete(p) => return p.iter().any(|&n| target.contains(&t.span(n))),
            crate::model::NucleusPath::Ambiguous(p) => {
                if p.iter().any(|&n| target.contains(&t.span(n))) {
                    return true;
                }
                let stop = *p.last().unwrap();
                if !is_same_unit(t, stop) || !t.is_ancestor_or_self(stop, matched) {
                    return false;
                }
                cur = t.child_towards(stop, matched).unwrap();
            }
        }
    }
}

/// Copy of `spec` with `k` characters inserted at `at` and the node at
/// `path` wrapped in an attribution whose satellite is the new text.
fn wrap_in_attribution(spec: &NodeSpec, path: &[usize], at: usize, k: usize) -> NodeSpec {
    fn shift(s: CharSpan, at: usize, k: usize) -> CharSpan {
        let start = if s.start() >= at { s.start() + k } else { s.start() };
        let end = if s.end() > at { s.end() + k } else { s.end() };
        CharSpan::new(start, end).unwrap()
    }
    fn go(spec: &NodeSpec, path: &[usize], at: usize, k: usize) -> NodeSpec {
        if let [first, rest @ ..] = path {
            let mut out = spec.clone();
            out.children = spec
                .children
                .iter()
                .enumerate()
                .map(|(i, c)| if i == *first { go(c, rest, at, k) } else { shifted(c, at, k) })
                .collect();
            out.span = CharSpan::new(out.children[0].span.start(), out.children.last().unwrap().span.end()).unwrap();
            return out;
        }
        let mut inner = shifted(spec, at, k);
        let (nuc, rel) = (inner.nuclearity, inner.rel2par.clone());
        inner.nuclearity = N;
        inner.rel2par = Rel2Par::Span;
        let attr = NodeSpec::leaf(CharSpan::new(at, at + k).unwrap(), S, "attribution", 0);
        let mut w = NodeSpec::internal(nuc, "span", vec![attr, inner]);
        w.rel2par = rel;
        w
    }
    fn shifted(spec: &NodeSpec, at: usize, k: usize) -> NodeSpec {
        let mut out = spec.clone();
        out.span = shift(spec.span, at, k);
        out.children = spec.children.iter().map(|c| shifted(c, at, k)).collect();
        out
    }
    fn renumber(spec: &mut NodeSpec, next: &mut u32) {
        if spec.children.is_empty() {
            *next += 1;
            spec.edu_id = Some(*next);
        }
        for c in spec.children.iter_mut() {
            renumber(c, next);
        }
    }
    let mut out = go(spec, path, at, k);
    renumber(&mut out, &mut 0);
    out
}

fn shift_set(s: &SpanSet, at: usize, k: usize) -> SpanSet {
    SpanSet::new(s.spans().iter().map(|x| {
        let start = if x.start() >= at { x.start() + k } else { x.start() };
        let end = if x.end() > at { x.end() + k } else { x.end() };
        sp(start, end)
    }))
}

fn attribution_count(r: &AlignmentRecord) -> u32 {
    r.flags
        .iter()
        .map(|f| match f {
            AlignmentFlag::InterveningAttribution(n) => *n,
            _ => 0,
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lcr_matches_brute_force(seed in any::<u64>(), n in 1usize..=12) {
        let t = random_tree_seeded(seed, n);
        let leaves: Vec<usize> = t.leaves().collect();
        for &a in &leaves {
            for &b in &leaves {
                prop_assert_eq!(lowest_common_relation(&t, a, b), brute_lcr(&t, a, b));
            }
        }
    }

    #[test]
    fn match_matches_exhaustive_scoring(seed in any::<u64>(), n in 1usize..=12) {
        let t = random_tree_seeded(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
        for _ in 0..5 {
            let arg = random_arg(&mut rng, t.span(t.root()).end() + 3);
            let got = match_argument(&arg, &t).map(|m| (m.node, m.overlap, m.margin));
            prop_assert_eq!(got, brute_match(&arg, &t));
        }
    }

    #[test]
    fn aligned_records_have_clean_nucleus_paths(seed in any::<u64>(), n in 2usize..=12) {
        let t = random_tree_seeded(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let end = t.span(t.root()).end();
        for _ in 0..8 {
            let cut = rng.random_range(1..end);
            let a1 = random_arg(&mut rng, cut);
            let a2 = shift_set(&random_arg(&mut rng, end - cut), 0, cut);
            let r = align_relation(&rel(a1, a2), &t);
            if r.status == Status::Aligned {
                prop_assert!(r.rst_label.is_some());
                prop_assert!(!r.flags.iter().any(AlignmentFlag::is_excluding));
                if r.has_flag("SameUnitResolved") {
                    continue;
                }
                let lcr = t.node_at_path(r.rst_node_path.as_ref().unwrap()).unwrap();
                for m in [&r.arg1_match, &r.arg2_match] {
                    let matched = t.node_at_path(&m.as_ref().unwrap().node_path).unwrap();
                    let side = t.child_towards(lcr, matched).unwrap();
                    prop_assert!(path_reaches(&t, side, matched));
                }
            }
            if r.status == Status::Unalignable {
                prop_assert!(r.rst_label.is_none());
            }
        }
    }

    #[test]
    fn attribution_only_changes_the_count(seed in any::<u64>(), n in 2usize..=10, k in 1usize..4, side in 0usize..2) {
        let t = random_tree_seeded(seed, n);
        let leaves: Vec<usize> = t.leaves().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = rng.random_range(0..leaves.len() - 1);
        let (a1, a2) = (SpanSet::single(t.span(leaves[i])), SpanSet::single(t.span(leaves[i + 1])));
        let before = align_relation(&rel(a1.clone(), a2.clone()), &t);
        prop_assume!(before.status == Status::Aligned && !before.has_flag("SameUnitResolved"));
        let m = [&before.arg1_match, &before.arg2_match][side].as_ref().unwrap();
        let at = m.span.start();
        let wrapped = RstTree::from_spec(&wrap_in_attribution(&t.to_spec(), &m.node_path, at, k));
        prop_assert!(crate::model::validate_tree(&wrapped).is_empty());
        let after = align_relation(&rel(shift_set(&a1, at, k), shift_set(&a2, at, k)), &wrapped);
        prop_assert_eq!(&after.rst_label, &before.rst_label);
        prop_assert_eq!(after.status, before.status);
        prop_assert_eq!(attribution_count(&after), attribution_count(&before) + 1);
        let strip = |r: &AlignmentRecord| -> Vec<AlignmentFlag> {
            r.flags.iter().copied().filter(|f| !matches!(f, AlignmentFlag::InterveningAttribution(_))).collect()
        };
        prop_assert_eq!(strip(&after), strip(&before));
    }

    #[test]
    fn alignment_is_repeatable(seed in any::<u64>(), n in 2usize..=12) {
        let t = random_tree_seeded(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let end = t.span(t.root()).end();
        let cut = rng.random_range(1..end);
        let r = rel(random_arg(&mut rng, cut), shift_set(&random_arg(&mut rng, end - cut), 0, cut));
        prop_assert_eq!(align_relation(&r, &t), align_relation(&r.clone(), &t.clone()));
    }
}
