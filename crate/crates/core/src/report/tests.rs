use super::*;
use crate::alignment::MatchRecord;
use crate::model::RelType;
use crate::stats::build_table;

fn rec(id: usize, sense: &str, rst: &str) -> AlignmentRecord {
    AlignmentRecord {
        doc_id: "d".into(),
        rel_id: format!("r{id:03}"),
        rel_type: RelType::Explicit,
        connective: "and".into(),
        senses: vec![SenseLabel::pdtb_raw(sense)],
        status: Status::Aligned,
        rst_label: Some(SenseLabel::rst_raw(rst)),
        rst_node_path: Some(vec![]),
        arg1_match: None,
        arg2_match: None,
        flags: vec![],
        in_analysis: true,
    }
}

fn grid() -> &'static CorrespondenceGrid {
    CorrespondenceGrid::bundled()
}

fn sample() -> Vec<AlignmentRecord> {
    let mut v = Vec::new();
    for i in 0..6 {
        v.push(rec(i, "Expansion.Conjunction", "list"));
    }
    for i in 6..9 {
        v.push(rec(i, "Contingency.Condition", "condition"));
    }
    v.push(rec(9, "Expansion.Conjunction", "elaboration-additional"));
    v.push(rec(10, "Comparison.Contrast", "antithesis"));
    v
}

#[test]
fn expectation_examples() {
    let r = annotate_expectations(&build_table(&sample(), 2, Split::All, grid()), grid());
    let t = &r.table;
    let at = |row: &str, col: &str| {
        let i = t.row_labels.iter().position(|l| l.to_string() == row).unwrap();
        let j = t.col_labels.iter().position(|l| l.to_string() == col).unwrap();
        r.cell_expectations[i][j]
    };
    assert_eq!(at("Contingency.Condition", "condition"), ExpectationLevel::All3);
    assert_eq!(at("Expansion.Conjunction", "list"), ExpectationLevel::Unexpected);
    assert!(
        r.notes
            .iter()
            .any(|n| n.contains("Expansion.Conjunction") && n.contains("list")),
        "{:?}",
        r.notes
    );
}

#[test]
fn empty_table_gives_empty_report() {
    let r = annotate_expectations(&build_table(&[], 2, Split::All, grid()), grid());
    assert!(r.cell_expectations.is_empty() && r.pdtb_summaries.is_empty() && r.rst_summaries.is_empty() && r.notes.is_empty());
    assert!(r.level_totals.is_empty());
    assert!(r.disputed_rows.iter().all(|d| d.total == 0 && d.top.is_empty()));
    assert!(render_markdown(&r, &RenderOptions::for_split(Split::All)).contains("No relations"));
}

#[test]
fn summaries_match_marginals() {
    let r = annotate_expectations(&build_table(&sample(), 2, Split::All, grid()), grid());
    assert_eq!(
        r.pdtb_summaries.iter().map(|s| s.total).collect::<Vec<_>>(),
        r.table.row_totals()
    );
    assert_eq!(
        r.rst_summaries.iter().map(|s| s.total).collect::<Vec<_>>(),
        r.table.col_totals()
    );
    for s in r.pdtb_summaries.iter().chain(&r.rst_summaries) {
        let sum: f64 = s.distribution.iter().map(|x| x.pct).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
    assert_eq!(r.level_totals.values().sum::<u64>(), r.table.total());
}

#[test]
fn disputed_rows_carry_top_senses() {
    let r = annotate_expectations(&build_table(&sample(), 2, Split::All, grid()), grid());
    let names: Vec<&str> = r.disputed_rows.iter().map(|d| d.rst.as_str()).collect();
    assert!(names.contains(&"antithesis") && names.contains(&"comparison"), "{names:?}");
    let anti = r.disputed_rows.iter().find(|d| d.rst == "antithesis").unwrap();
    assert_eq!(anti.total, 1);
    assert_eq!(anti.top[0].pdtb, "Comparison.Contrast");
    assert_eq!(anti.top[0].expectation, ExpectationLevel::TwoOfThree);
}

fn matched(node_path: Vec<usize>, margin: usize) -> Option<MatchRecord> {
    Some(MatchRecord {
        node_path,
        span: crate::model::CharSpan::new(0, 10).unwrap(),
        overlap: 10,
        margin,
        kind: crate::alignment::MatchKind::Edu,
    })
}

#[test]
fn yield_examples() {
    let mut all: Vec<AlignmentRecord> = (0..4).map(|i| rec(i, "Expansion.Conjunction", "list")).collect();
    for r in all.iter_mut() {
        r.arg1_match = matched(vec![0], 0);
        r.arg2_match = matched(vec![1], 0);
    }
    let y = yield_summary(&all);
    assert_eq!((y.mapped_pct, y.exact_pct), (1.0, 1.0));

    all[3].status = Status::Flagged;
    all[3].in_analysis = false;
    all[3].flags = vec![AlignmentFlag::NuclearityViolation];
    let y = yield_summary(&all);
    assert_eq!(y.mapped_pct, 0.75);
    assert_eq!(y.flagged_pct, 0.25);
    assert_eq!(y.flag_histogram, BTreeMap::from([("NuclearityViolation".to_string(), 1)]));
    assert_eq!(yield_summary(&[]).mapped_pct, 0.0);
}

#[test]
fn other_bucket_in_markdown_only() {
    let r = annotate_expectations(&build_table(&sample(), 2, Split::All, grid()), grid());
    let md = render_markdown(&r, &RenderOptions { other_threshold: 3 });
    assert!(md.contains("| other |"), "{md}");
    assert!(
        md.contains("| Expansion.Conjunction | 0 | 6 | 1 | 7 |\n| other | 0 | 0 | 1 | 1 |"),
        "{md}"
    );
    let json = render_json(&r);
    assert!(json.contains("\"antithesis\""));
    assert!(!json.contains("\"other\""));
}

#[test]
fn rendering_is_stable() {
    let r1 = mapping_report(&sample(), Split::All, 2, grid());
    let r2 = mapping_report(&sample(), Split::All, 2, grid());
    let o = RenderOptions::for_split(Split::All);
    assert_eq!(render_markdown(&r1, &o), render_markdown(&r2, &o));
    assert_eq!(render_json(&r1), render_json(&r2));
}

#[test]
fn json_floats_have_six_decimals() {
    let recs = vec![
        rec(0, "Comparison.Contrast", "contrast"),
        rec(1, "Comparison.Contrast", "contrast"),
        rec(2, "Comparison.Contrast", "concession"),
    ];
    let json = render_json(&annotate_expectations(&build_table(&recs, 2, Split::All, grid()), grid()));
    assert!(json.contains("0.666667"), "{json}");
    assert!(json.contains("0.333333"));
}

#[test]
fn queries() {
    let recs = sample();
    assert_eq!(query(&recs, &Query::rst("List").unwrap()).len(), 6);
    assert_eq!(query(&recs, &Query::pdtb("Expansion").unwrap()).len(), 7);
    assert_eq!(query(&recs, &Query::pdtb("Contingency.Condition").unwrap()).len(), 3);
    assert!(Query::flag("nuclearityviolation").is_ok());
    assert!(Query::flag("Nope").is_err());
    assert!(Query::rst("no-such-relation").is_err());
}
