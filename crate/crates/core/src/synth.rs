//! Random RST trees and paired synthetic corpora.
//!
//! Used by the property tests and by the generator that produces the sample
//! corpus under `data/synthetic/`.

use std::fs;
use std::io;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ingestion::{serialize_pdtb_jsonl, serialize_rst_dis, serialize_rst_json};
use crate::model::{CharSpan, NodeSpec, Nuclearity, PdtbRelation, RelType, RstTree, SpanSet};
use crate::taxonomy::SenseLabel;

const MONO: &[&str] = &[
    "elaboration-additional",
    "attribution",
    "concession",
    "cause",
    "condition",
    "circumstance",
    "background",
    "antithesis",
    "explanation-argumentative",
    "temporal-after",
    "example",
    "purpose",
    "elaboration-object-attribute",
    "evidence",
    "comparison",
    "result",
];

const MULTI: &[&str] = &[
    "list",
    "contrast",
    "temporal-same-time",
    "sequence",
    "disjunction",
    "same-unit",
];

#[derive(Clone, Debug)]
struct Shape {
    nuclearity: Nuclearity,
    rel2par: String,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Leaf(usize),
    Internal(Vec<Shape>),
}

impl Shape {
    fn first_edu(&self) -> usize {
        match &self.kind {
            Kind::Leaf(i) => *i,
            Kind::Internal(c) => c[0].first_edu(),
        }
    }

    fn last_edu(&self) -> usize {
        match &self.kind {
            Kind::Leaf(i) => *i,
            Kind::Internal(c) => c[c.len() - 1].last_edu(),
        }
    }

    /// EDU reached by always descending into the single nucleus.
    fn nucleus_edu(&self) -> Option<usize> {
        match &self.kind {
            Kind::Leaf(i) => Some(*i),
            Kind::Internal(c) => {
                let mut nuclei = c.iter().filter(|s| s.nuclearity == Nuclearity::Nucleus);
                match (nuclei.next(), nuclei.next()) {
                    (Some(n), None) => n.nucleus_edu(),
                    _ => None,
                }
            }
        }
    }

    fn to_spec(&self, spans: &[CharSpan]) -> NodeSpec {
        match &self.kind {
            Kind::Leaf(i) => NodeSpec::leaf(spans[*i], self.nuclearity, &self.rel2par, *i as u32 + 1),
            Kind::Internal(c) => NodeSpec::internal(self.nuclearity, &self.rel2par, c.iter().map(|s| s.to_spec(spans)).collect()),
        }
    }
}

/// Cut points splitting `lo..hi` into `k` non-empty consecutive ranges.
fn cuts(rng: &mut impl Rng, lo: usize, hi: usize, k: usize) -> Vec<usize> {
    let mut inner: Vec<usize> = rand::seq::index::sample(rng, hi - lo - 1, k - 1)
        .into_iter()
        .map(|i| lo + 1 + i)
        .collect();
    inner.sort_unstable();
    let mut out = vec![lo];
    out.extend(inner);
    out.push(hi);
    out
}

fn shape(rng: &mut impl Rng, lo: usize, hi: usize, nuclearity: Nuclearity, rel2par: &str, multi_p: f64) -> Shape {
    let kind = if hi - lo == 1 {
        Kind::Leaf(lo)
    } else if rng.random_bool(multi_p) {
        let label = *MULTI.choose(rng).expect("non-empty");
        let k = (hi - lo).min(rng.random_range(2..=3));
        let c = cuts(rng, lo, hi, k);
        Kind::Internal(
            c.windows(2)
                .map(|w| shape(rng, w[0], w[1], Nuclearity::Nucleus, label, multi_p))
                .collect(),
        )
    } else {
        let label = *MONO.choose(rng).expect("non-empty");
        let c = cuts(rng, lo, hi, 2);
        let nucleus_left = rng.random_bool(0.6);
        let (n0, r0, n1, r1) = if nucleus_left {
            (Nuclearity::Nucleus, "span", Nuclearity::Satellite, label)
        } else {
            (Nuclearity::Satellite, label, Nuclearity::Nucleus, "span")
        };
        Kind::Internal(vec![
            shape(rng, c[0], c[1], n0, r0, multi_p),
            shape(rng, c[1], c[2], n1, r1, multi_p),
        ])
    };
    Shape {
        nuclearity,
        rel2par: rel2par.to_string(),
        kind,
    }
}

/// Valid random tree over `n_edus` EDUs of 1..=5 characters tiling `[0, total)`.
pub fn random_tree(rng: &mut impl Rng, n_edus: usize) -> RstTree {
    assert!(n_edus >= 1);
    let mut spans = Vec::with_capacity(n_edus);
    let mut pos = 0;
    for _ in 0..n_edus {
        let len = rng.random_range(1..=5);
        spans.push(CharSpan::new(pos, pos + len).expect("positive length"));
        pos += len;
    }
    let s = shape(rng, 0, n_edus, Nuclearity::Root, "span", 0.3);
    RstTree::from_spec(&s.to_spec(&spans))
}

/// Same as [`random_tree`] from a 64-bit seed.
pub fn random_tree_seeded(seed: u64, n_edus: usize) -> RstTree {
    random_tree(&mut ChaCha8Rng::seed_from_u64(seed), n_edus)
}

/// One generated document with its annotation layers.
#[derive(Clone, Debug)]
pub struct SynthDoc {
    pub doc_id: String,
    pub text: String,
    pub tree: RstTree,
    pub relations: Vec<PdtbRelation>,
    /// Write the tree as `.dis` rather than JSON.
    pub dis: bool,
}

/// PDTB readings and connectives plausible for an RST label; repeats
/// weight the draw.
fn readings(rst: &str) -> &'static [(&'static str, &'static str)] {
    match rst {
        "contrast" => &[
            ("Comparison.Contrast", "while"),
            ("Comparison.Contrast", "while"),
            ("Comparison.Contrast", "but"),
            ("Comparison.Contrast", "but"),
            ("Comparison.Contrast", "however"),
        ],
        "concession" | "antithesis" => &[
            ("Comparison.Concession", "but"),
            ("Comparison.Concession", "but"),
            ("Comparison.Concession", "although"),
        ],
        "comparison" => &[("Comparison.Contrast", "whereas"), ("Expansion.Conjunction", "and")],
        "cause" | "explanation-argumentative" | "evidence" => {
            &[("Contingency.Cause.Reason", "because"), ("Contingency.Cause.Reason", "since")]
        }
        "result" => &[("Contingency.Cause.Result", "so")],
        "purpose" => &[("Contingency.Cause.Result", "so that")],
        "condition" => &[("Contingency.Condition", "if")],
        "circumstance" => &[("Temporal.Synchrony", "when"), ("Temporal.Asynchronous.Succession", "after")],
        "temporal-same-time" => &[
            ("Temporal.Synchrony", "while"),
            ("Temporal.Synchrony", "while"),
            ("Temporal.Synchrony", "as"),
        ],
        "temporal-after" => &[("Temporal.Asynchronous.Succession", "after")],
        "sequence" => &[("Temporal.Asynchronous.Precedence", "then")],
        "background" => &[
            ("Temporal.Asynchronous.Precedence", "before"),
            ("Expansion.Conjunction", "and"),
        ],
        "list" => &[("Expansion.Conjunction", "and"), ("Expansion.Conjunction", "also")],
        "disjunction" => &[("Expansion.Alternative", "or")],
        "example" => &[("Expansion.Instantiation", "for example")],
        "elaboration-additional" | "elaboration-object-attribute" => {
            &[("Expansion.Restatement", "in fact"), ("Expansion.Conjunction", "and")]
        }
        _ => &[],
    }
}

const WORDS: &[&str] = &[
    "the",
    "company",
    "said",
    "prices",
    "rose",
    "sharply",
    "in",
    "trading",
    "analysts",
    "expect",
    "growth",
    "to",
    "slow",
    "next",
    "year",
    "investors",
    "sold",
    "shares",
    "after",
    "report",
    "market",
    "closed",
    "higher",
    "bonds",
    "fell",
    "board",
    "approved",
    "plan",
    "sales",
    "declined",
    "quarter",
    "profit",
    "jumped",
    "officials",
    "noted",
    "demand",
    "remained",
    "strong",
    "despite",
    "costs",
    "output",
    "increased",
    "banks",
    "lent",
    "more",
    "money",
];

struct Planned {
    arg1: (usize, usize),
    arg2: (usize, usize),
    rel_type: RelType,
    sense: String,
    connective: String,
}

/// EDU range for one argument: the nucleus EDU, the whole side, or now and
/// then an arbitrary EDU inside it.
fn pick_arg(rng: &mut impl Rng, side: &Shape) -> (usize, usize) {
    match side.nucleus_edu() {
        Some(e) if rng.random_bool(0.5) => (e, e),
        _ if rng.random_bool(0.05) => {
            let e = rng.random_range(side.first_edu()..=side.last_edu());
            (e, e)
        }
        _ => (side.first_edu(), side.last_edu()),
    }
}

fn plan_relations(rng: &mut impl Rng, s: &Shape, out: &mut Vec<Planned>) {
    let Kind::Internal(children) = &s.kind else { return };
    for c in children {
        plan_relations(rng, c, out);
    }
    let label = children
        .iter()
        .find(|c| c.nuclearity == Nuclearity::Satellite)
        .map(|c| c.rel2par.as_str())
        .unwrap_or(children[0].rel2par.as_str());
    let options = readings(label);
    if options.is_empty() || children.len() < 2 {
        return;
    }
    let (left, right) = (&children[0], &children[1]);
    let arg1 = pick_arg(rng, left);
    let arg2 = pick_arg(rng, right);
    let (mut sense, connective) = *options.choose(rng).expect("non-empty");
    if connective == "but" {
        sense = if rng.random_bool(0.5) {
            "Comparison.Contrast"
        } else {
            "Comparison.Concession"
        };
    }
    let roll: f64 = rng.random();
    let rel_type = if label.starts_with("elaboration") && roll < 0.4 {
        RelType::EntRel
    } else if roll < 0.7 {
        RelType::Explicit
    } else {
        RelType::Implicit
    };
    let (sense, connective) = match rel_type {
        RelType::EntRel => ("EntRel".to_string(), String::new()),
        _ => (sense.to_string(), connective.to_string()),
    };
    out.push(Planned {
        arg1,
        arg2,
        rel_type,
        sense,
        connective,
    });
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn generate_doc(rng: &mut impl Rng, doc_id: String, dis: bool) -> SynthDoc {
    let n_edus = rng.random_range(16..=22);
    let s = shape(rng, 0, n_edus, Nuclearity::Root, "span", 0.2);
    let mut planned = Vec::new();
    plan_relations(rng, &s, &mut planned);

    // Connective prefixes, at most one per EDU; later claims fall back to implicit.
    let mut prefix: Vec<Option<String>> = vec![None; n_edus];
    for p in planned.iter_mut() {
        if p.rel_type == RelType::Explicit {
            let slot = &mut prefix[p.arg2.0];
            if slot.is_none() {
                *slot = Some(p.connective.clone());
            } else {
                p.rel_type = RelType::Implicit;
            }
        }
    }

    let mut text = String::new();
    let mut pos = 0usize;
    let mut edu_spans = Vec::new();
    let mut content = Vec::new();
    let mut conn_spans = vec![None; n_edus];
    let mut word_bounds: Vec<Vec<(usize, usize)>> = Vec::new();
    for (i, pre) in prefix.iter().enumerate() {
        let start = pos;
        let mut words: Vec<String> = (0..rng.random_range(4..=9))
            .map(|_| WORDS.choose(rng).expect("non-empty").to_string())
            .collect();
        if let Some(c) = pre {
            words.insert(0, c.clone());
        }
        words[0] = capitalize(&words[0]);
        let mut bounds = Vec::new();
        for (k, w) in words.iter().enumerate() {
            if k > 0 {
                text.push(' ');
                pos += 1;
            }
            bounds.push((pos, pos + w.chars().count()));
            text.push_str(w);
            pos += w.chars().count();
        }
        text.push('.');
        pos += 1;
        let content_start = match pre {
            Some(c) => {
                let n = c.split_whitespace().count();
                conn_spans[i] = Some(CharSpan::new(bounds[0].0, bounds[n - 1].1).expect("non-empty connective"));
                bounds[n].0
            }
            None => start,
        };
        content.push((content_start, pos));
        word_bounds.push(bounds);
        if i + 1 < n_edus {
            text.push(' ');
            pos += 1;
        }
        edu_spans.push(CharSpan::new(start, pos).expect("non-empty EDU"));
    }

    let mut relations = Vec::new();
    for (k, p) in planned.iter().enumerate() {
        let arg1 = CharSpan::new(edu_spans[p.arg1.0].start(), content[p.arg1.1].1).expect("arg1");
        let arg2 = CharSpan::new(content[p.arg2.0].0, content[p.arg2.1].1).expect("arg2");
        let conn = match p.rel_type {
            RelType::Explicit => SpanSet::new(conn_spans[p.arg2.0]),
            _ => SpanSet::default(),
        };
        let senses = match p.rel_type {
            RelType::EntRel => Vec::new(),
            _ => vec![SenseLabel::pdtb_raw(&p.sense)],
        };
        let rel = PdtbRelation::new(
            format!("r{:03}", k + 1),
            p.rel_type,
            conn,
            p.connective.clone(),
            senses,
            SpanSet::single(arg1),
            SpanSet::single(arg2),
        )
        .expect("generated relation is valid");
        relations.push(rel);
    }

    // A relation inside one EDU now and then.
    if rng.random_bool(0.3) {
        let i = rng.random_range(0..n_edus);
        let b = &word_bounds[i];
        if b.len() >= 4 {
            let mid = b.len() / 2;
            let a1 = CharSpan::new(b[0].0, b[mid - 1].1).expect("arg1");
            let a2 = CharSpan::new(b[mid].0, b[b.len() - 1].1).expect("arg2");
            let rel = PdtbRelation::new(
                format!("r{:03}", relations.len() + 1),
                RelType::Implicit,
                SpanSet::default(),
                "because",
                vec![SenseLabel::pdtb_raw("Contingency.Cause.Reason")],
                SpanSet::single(a1),
                SpanSet::single(a2),
            )
            .expect("internal relation is valid");
            relations.push(rel);
        }
    }

    let tree = RstTree::from_spec(&s.to_spec(&edu_spans));
    SynthDoc {
        doc_id,
        text,
        tree,
        relations,
        dis,
    }
}

/// Deterministic corpus of `n_docs` documents; every fourth uses `.dis`.
pub fn generate_corpus(seed: u64, n_docs: usize) -> Vec<SynthDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|i| generate_doc(&mut rng, format!("synth_{:03}", i + 1), i % 4 == 3))
        .collect()
}

#[derive(Serialize)]
struct ManifestLine<'a> {
    doc_id: &'a str,
    text: String,
    rst: String,
    pdtb: String,
}

/// Writes texts, trees, relations and `manifest.json` into `dir`.
pub fn write_corpus(dir: &Path, docs: &[SynthDoc]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = Vec::new();
    for d in docs {
        let text = format!("{}.txt", d.doc_id);
        let rst = if d.dis {
            format!("{}.dis", d.doc_id)
        } else {
            format!("{}.rst.json", d.doc_id)
        };
        let pdtb = format!("{}.pdtb.jsonl", d.doc_id);
        fs::write(dir.join(&text), &d.text)?;
        let tree = if d.dis {
            serialize_rst_dis(&d.tree, &d.text)
        } else {
            serialize_rst_json(&d.doc_id, &d.tree)
        };
        fs::write(dir.join(&rst), tree + "\n")?;
        fs::write(dir.join(&pdtb), serialize_pdtb_jsonl(&d.doc_id, &d.relations))?;
        manifest.push(ManifestLine {
            doc_id: &d.doc_id,
            text,
            rst,
            pdtb,
        });
    }
    let js = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
    fs::write(dir.join("manifest.json"), js + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_tree;
    use crate::taxonomy::TaxonomyTable;

    #[test]
    fn random_trees_are_valid() {
        for seed in 0..300 {
            let t = random_tree_seeded(seed, 1 + (seed as usize % 12));
            assert!(validate_tree(&t).is_empty(), "seed {seed}: {:?}", validate_tree(&t));
        }
    }

    #[test]
    fn corpus_is_valid_and_stable() {
        let a = generate_corpus(7, 4);
        let b = generate_corpus(7, 4);
        let tax = TaxonomyTable::bundled();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.text, y.text);
            assert_eq!(x.relations, y.relations);
            assert!(validate_tree(&x.tree).is_empty());
            for r in &x.relations {
                for s in &r.senses {
                    assert!(tax.is_known(s), "{s}");
                }
            }
            for lab in x.tree.nodes().iter().filter_map(|n| n.rel2par.label()) {
                assert!(tax.resolve_rst(lab).is_ok(), "{lab}");
            }
        }
    }
}
