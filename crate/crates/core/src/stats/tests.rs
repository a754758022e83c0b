use super::*;
use crate::alignment::{AlignmentRecord, Status};
use crate::mapping::CorrespondenceGrid;
use crate::model::RelType;
use crate::taxonomy::SenseLabel;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn record(rel_type: RelType, sense: &str, rst: &str, connective: &str) -> AlignmentRecord {
    AlignmentRecord {
        doc_id: "d".into(),
        rel_id: "r".into(),
        rel_type,
        connective: connective.into(),
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

#[test]
fn chi_square_two_by_two() {
    let r = chi_square(&[vec![20, 5], vec![5, 20]]).unwrap();
    assert!(close(r.statistic.unwrap(), 18.0, 1e-12));
    assert_eq!(r.df, Some(1));
    assert!(close(r.p_value, 2.209_4e-5, 1e-8), "{}", r.p_value);
}

#[test]
fn chi_square_independent_table() {
    let r = chi_square(&[vec![10, 10], vec![10, 10]]).unwrap();
    assert_eq!(r.statistic, Some(0.0));
    assert!(close(r.p_value, 1.0, 1e-12));
}

#[test]
fn chi_square_rejects_zero_margins() {
    assert_eq!(chi_square(&[vec![0, 0], vec![3, 4]]), Err(StatsError::Degenerate));
    assert_eq!(chi_square(&[vec![1, 2], vec![3]]), Err(StatsError::Shape));
}

#[test]
fn fisher_small_tables() {
    let o = FisherOptions::default();
    assert!(close(
        fisher_exact(&[vec![3, 1], vec![1, 3]], &o).unwrap().p_value,
        34.0 / 70.0,
        1e-12
    ));
    assert!(close(
        fisher_exact(&[vec![4, 0], vec![0, 4]], &o).unwrap().p_value,
        2.0 / 70.0,
        1e-12
    ));
}

#[test]
fn fisher_single_row_is_uninformative() {
    let r = fisher_exact(&[vec![3, 4, 5]], &FisherOptions::default()).unwrap();
    assert_eq!(r.p_value, 1.0);
    assert_eq!(r.warning.as_deref(), Some("margins determine the table"));
    let r = fisher_exact(&[vec![3, 0], vec![4, 0]], &FisherOptions::default()).unwrap();
    assert_eq!(r.p_value, 1.0);
}

#[test]
fn fisher_falls_back_to_sampling() {
    let t = vec![vec![3, 1], vec![1, 3]];
    let o = FisherOptions {
        exact_limit: 2,
        samples: 20_000,
        seed: 7,
    };
    let r = fisher_exact(&t, &o).unwrap();
    let mc = r.monte_carlo.expect("sampled");
    assert_eq!((mc.samples, mc.seed), (20_000, 7));
    assert!((r.p_value - 34.0 / 70.0).abs() < 4.0 * mc.std_error);
    assert_eq!(fisher_exact(&t, &o).unwrap(), r);
}

#[test]
fn method_follows_expected_counts() {
    let o = FisherOptions::default();
    assert_eq!(
        independence_test(&[vec![20, 5], vec![5, 20]], &o).unwrap().method,
        Method::ChiSquare
    );
    assert_eq!(
        independence_test(&[vec![3, 1], vec![1, 3]], &o).unwrap().method,
        Method::FisherExact
    );
    // The zero column is dropped before the choice is made.
    let r = independence_test(&[vec![20, 0, 5], vec![5, 0, 20]], &o).unwrap();
    assert_eq!((r.method, r.df), (Method::ChiSquare, Some(1)));
}

#[test]
fn kappa_examples() {
    assert!(close(cohen_kappa(&[vec![45, 15], vec![25, 15]]).unwrap(), 0.130_435, 1e-6));
    assert!(close(cohen_kappa(&[vec![7, 0], vec![0, 9]]).unwrap(), 1.0, 1e-12));
    assert!(close(cohen_kappa(&[vec![5, 5], vec![5, 5]]).unwrap(), 0.0, 1e-12));
    assert_eq!(cohen_kappa(&[vec![1, 2]]), Err(StatsError::NotSquare));
    assert_eq!(cohen_kappa(&[vec![0, 0], vec![0, 0]]), Err(StatsError::KappaUndefined));
    assert_eq!(cohen_kappa(&[vec![4, 0], vec![0, 0]]), Err(StatsError::KappaUndefined));
}

#[test]
fn table_counts_and_levels() {
    let grid = CorrespondenceGrid::bundled();
    let recs = vec![
        record(RelType::Explicit, "Comparison.Contrast", "contrast", "but"),
        record(RelType::Explicit, "Comparison.Contrast", "contrast", "while"),
        record(RelType::Explicit, "Comparison.Contrast", "concession", "but"),
        record(RelType::Implicit, "Contingency.Cause.Result", "result", ""),
    ];
    let t = build_table(&recs, 2, Split::Explicit, grid);
    assert_eq!(t.total(), 3);
    assert_eq!(
        t.row_labels.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        ["Comparison.Contrast"]
    );
    assert_eq!(t.counts, vec![vec![2, 1]]);
    assert_eq!(t.count("Comparison.Contrast", "concession"), 1);

    let t1 = build_table(&recs, 1, Split::All, grid);
    assert_eq!(t1.count("Comparison", "contrast"), 2);
    assert_eq!(t1.count("Contingency", "result"), 1);
    assert_eq!(t1.row_totals().iter().sum::<u64>(), t1.total());
    assert_eq!(t1.col_totals().iter().sum::<u64>(), t1.total());
}

#[test]
fn tables_skip_records_outside_the_analysis() {
    let grid = CorrespondenceGrid::bundled();
    let mut r = record(RelType::Explicit, "Comparison.Contrast", "contrast", "but");
    r.in_analysis = false;
    assert!(build_table(&[r], 2, Split::All, grid).is_empty());
}

#[test]
fn splits() {
    assert!(Split::Implicit.admits(RelType::EntRel));
    assert!(!Split::Implicit.admits(RelType::AltLex));
    assert!(Split::All.admits(RelType::AltLex));
    assert!(!Split::Explicit.admits(RelType::Implicit));
    assert_eq!("ALL".parse::<Split>(), Ok(Split::All));
    assert!("both".parse::<Split>().is_err());
}

#[test]
fn tsv_has_totals() {
    let grid = CorrespondenceGrid::bundled();
    let recs = vec![
        record(RelType::Explicit, "Comparison.Contrast", "contrast", "but"),
        record(RelType::Explicit, "Comparison.Contrast", "concession", "but"),
    ];
    let tsv = build_table(&recs, 2, Split::Explicit, grid).to_tsv();
    assert_eq!(
        tsv,
        "pdtb\\rst\tcontrast\tconcession\ttotal\nComparison.Contrast\t1\t1\t2\ntotal\t1\t1\t2\n"
    );
}

#[test]
fn small_connectives_are_skipped() {
    let grid = CorrespondenceGrid::bundled();
    let recs: Vec<_> = (0..3)
        .map(|_| record(RelType::Explicit, "Comparison.Contrast", "contrast", "But "))
        .collect();
    let out = connective_tests(&recs, grid, &ConnectiveOptions::default());
    assert_eq!(out.len(), 1);
    assert_eq!((out[0].connective.as_str(), out[0].n, out[0].skipped), ("but", 3, true));
    assert!(out[0].result.is_none());
}

#[test]
fn connective_kappa_uses_shared_labels() {
    let grid = CorrespondenceGrid::bundled();
    let mut recs = Vec::new();
    for _ in 0..6 {
        recs.push(record(RelType::Explicit, "Comparison.Contrast", "contrast", "but"));
        recs.push(record(RelType::Explicit, "Comparison.Concession", "concession", "but"));
    }
    let out = connective_tests(&recs, grid, &ConnectiveOptions::default());
    assert!(!out[0].skipped);
    assert!(close(out[0].kappa.unwrap(), 1.0, 1e-12));
    assert!(out[0].result.as_ref().unwrap().p_value < 0.01);
}

#[test]
fn connective_normalization_and_seeds() {
    assert_eq!(normalize_connective("  As   Long as "), "as long as");
    assert_ne!(connective_seed(1, "but"), connective_seed(1, "while"));
    assert_eq!(connective_seed(1, "but"), connective_seed(1, "but"));
}

#[test]
fn kappa_pairs_subset() {
    let pairs: Vec<(String, String)> = [("a", "a"), ("b", "b"), ("a", "c")]
        .iter()
        .map(|(x, y)| (x.to_string(), y.to_string()))
        .collect();
    assert!(close(kappa_from_pairs(&pairs, Some(&["a", "b"])).unwrap(), 1.0, 1e-12));
}

#[test]
fn empty_records_give_empty_table() {
    let t = build_table(&[], 2, Split::All, CorrespondenceGrid::bundled());
    assert!(t.is_empty() && t.counts.is_empty());
}

#[test]
fn deterministic_connective_is_significant() {
    let grid = CorrespondenceGrid::bundled();
    let mut recs = Vec::new();
    for _ in 0..15 {
        recs.push(record(RelType::Explicit, "Comparison.Contrast", "contrast", "while"));
        recs.push(record(RelType::Explicit, "Temporal.Synchrony", "temporal-same-time", "while"));
    }
    let out = connective_tests(&recs, grid, &ConnectiveOptions::default());
    let r = out[0].result.as_ref().unwrap();
    assert!(r.p_value < 1e-4, "{r:?}");
}

#[test]
fn independent_connective_is_mostly_not_significant() {
    use rand::{Rng, SeedableRng};
    let grid = CorrespondenceGrid::bundled();
    let senses = ["Comparison.Contrast", "Comparison.Concession"];
    let labels = ["contrast", "concession", "antithesis"];
    let mut not_small = 0;
    for seed in 0..100u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let recs: Vec<_> = (0..40)
            .map(|_| {
                let s = senses[usize::from(rng.random_bool(0.6))];
                let l = labels[rng.random_range(0..3)];
                record(RelType::Explicit, s, l, "but")
            })
            .collect();
        let out = connective_tests(&recs, grid, &ConnectiveOptions::default());
        if out[0].result.as_ref().unwrap().p_value > 0.05 {
            not_small += 1;
        }
    }
    assert!(not_small >= 85, "{not_small}/100");
}
