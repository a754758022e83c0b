//! Observed-versus-expected reports over contingency tables.

mod render;

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::alignment::{AlignmentFlag, AlignmentRecord, Status};
use crate::mapping::{CorrespondenceGrid, ExpectationLevel};
use crate::stats::{ContingencyTable, Split};
use crate::taxonomy::{is_descendant, SenseLabel, TaxonomyTable};

pub use render::{render_json, render_markdown, RenderOptions};

pub(crate) fn ser_f6<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round6(*x))
}

pub(crate) fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Share {
    pub label: String,
    pub count: u64,
    #[serde(serialize_with = "ser_f6")]
    pub pct: f64,
}

/// How one label's relations spread over the labels of the other framework.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabelSummary {
    pub label: String,
    pub total: u64,
    /// Largest share first.
    pub distribution: Vec<Share>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedSense {
    pub pdtb: String,
    pub count: u64,
    #[serde(serialize_with = "ser_f6")]
    pub pct: f64,
    pub expectation: ExpectationLevel,
}

/// A label the proposals disagree on, with its three most frequent senses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisputedRow {
    pub rst: String,
    pub total: u64,
    pub top: Vec<RankedSense>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MappingReport {
    pub grid_version: String,
    pub table: ContingencyTable,
    /// Same shape as `table.counts`.
    pub cell_expectations: Vec<Vec<ExpectationLevel>>,
    /// Relations per expectation level.
    pub level_totals: BTreeMap<ExpectationLevel, u64>,
    pub pdtb_summaries: Vec<LabelSummary>,
    pub rst_summaries: Vec<LabelSummary>,
    pub disputed_rows: Vec<DisputedRow>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yield_summary: Option<YieldSummary>,
}

fn summarize(label: &SenseLabel, others: &[SenseLabel], counts: impl Iterator<Item = u64>) -> LabelSummary {
    let pairs: Vec<(String, u64)> = others
        .iter()
        .map(|l| l.to_string())
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .collect();
    let total: u64 = pairs.iter().map(|(_, c)| c).sum();
    let mut distribution: Vec<Share> = pairs
        .into_iter()
        .map(|(label, count)| Share {
            label,
            count,
            pct: count as f64 / total as f64,
        })
        .collect();
    // Stable sort keeps the table's label order among equal counts.
    distribution.sort_by_key(|s| std::cmp::Reverse(s.count));
    LabelSummary {
        label: label.to_string(),
        total,
        distribution,
    }
}

/// Tags every cell with how many proposals predict it and summarizes the
/// table in both directions.
pub fn annotate_expectations(table: &ContingencyTable, grid: &CorrespondenceGrid) -> MappingReport {
    let cell_expectations: Vec<Vec<ExpectationLevel>> = table
        .row_labels
        .iter()
        .map(|pdtb| table.col_labels.iter().map(|rst| grid.expectation_level(rst, pdtb)).collect())
        .collect();
    let mut level_totals = BTreeMap::new();
    for (row, levels) in table.counts.iter().zip(&cell_expectations) {
        for (&n, &lvl) in row.iter().zip(levels) {
            if n > 0 {
                *level_totals.entry(lvl).or_insert(0) += n;
            }
        }
    }
    let pdtb_summaries: Vec<LabelSummary> = table
        .row_labels
        .iter()
        .zip(&table.counts)
        .map(|(l, row)| summarize(l, &table.col_labels, row.iter().copied()))
        .collect();
    let rst_summaries: Vec<LabelSummary> = table
        .col_labels
        .iter()
        .enumerate()
        .map(|(j, l)| summarize(l, &table.row_labels, table.counts.iter().map(|r| r[j])))
        .collect();

    let disputed_rows = grid
        .disputed_rows()
        .iter()
        .map(|rst| {
            let s = rst_summaries.iter().find(|s| s.label == rst.to_string());
            DisputedRow {
                rst: rst.to_string(),
                total: s.map_or(0, |s| s.total),
                top: s
                    .map(|s| {
                        s.distribution
                            .iter()
                            .take(3)
                            .map(|sh| RankedSense {
                                pdtb: sh.label.clone(),
                                count: sh.count,
                                pct: sh.pct,
                                expectation: grid.expectation_level(rst, &SenseLabel::pdtb_raw(&sh.label)),
                            })
                            .collect()
                    })
                    .unwrap_or_default(),
            }
        })
        .collect();

    let mut notes = Vec::new();
    for s in &pdtb_summaries {
        let Some(top) = s.distribution.first() else { continue };
        let pdtb = SenseLabel::pdtb_raw(&s.label);
        if top.pct > 0.5 && grid.expectation_level(&SenseLabel::rst_raw(&top.label), &pdtb) == ExpectationLevel::Unexpected {
            notes.push(format!(
                "{} of {} relations ({}/{}) align with {}, which no proposal predicts",
                fmt_pct(top.pct),
                s.label,
                top.count,
                s.total,
                top.label
            ));
        }
    }

    MappingReport {
        grid_version: grid.version().to_string(),
        table: table.clone(),
        cell_expectations,
        level_totals,
        pdtb_summaries,
        rst_summaries,
        disputed_rows,
        notes,
        yield_summary: None,
    }
}

pub(crate) fn fmt_pct(x: f64) -> String {
    format!("{:.1}%", x * 100.0)
}

/// How much of a corpus run made it into the analysis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YieldSummary {
    pub total: usize,
    pub mapped: usize,
    /// Mapped relations whose arguments both sit on single EDUs.
    pub exact: usize,
    pub flagged: usize,
    pub unalignable: usize,
    /// Over all relations.
    #[serde(serialize_with = "ser_f6")]
    pub mapped_pct: f64,
    /// Over mapped relations.
    #[serde(serialize_with = "ser_f6")]
    pub exact_pct: f64,
    /// Over all relations.
    #[serde(serialize_with = "ser_f6")]
    pub flagged_pct: f64,
    /// Records carrying each flag.
    pub flag_histogram: BTreeMap<String, usize>,
}

pub fn yield_summary(records: &[AlignmentRecord]) -> YieldSummary {
    let total = records.len();
    let mapped: Vec<&AlignmentRecord> = records.iter().filter(|r| r.in_analysis).collect();
    let exact = mapped.iter().filter(|r| r.is_direct()).count();
    let flagged = records.iter().filter(|r| r.status == Status::Flagged).count();
    let unalignable = records.iter().filter(|r| r.status == Status::Unalignable).count();
    let mut flag_histogram = BTreeMap::new();
    for r in records {
        let mut names: Vec<&str> = r.flags.iter().map(AlignmentFlag::name).collect();
        names.dedup();
        for n in names {
            *flag_histogram.entry(n.to_string()).or_insert(0) += 1;
        }
    }
    YieldSummary {
        total,
        mapped: mapped.len(),
        exact,
        flagged,
        unalignable,
        mapped_pct: ratio(mapped.len(), total),
        exact_pct: ratio(exact, mapped.len()),
        flagged_pct: ratio(flagged, total),
        flag_histogram,
    }
}

/// Builds the table for a split and level, annotates it and adds the yield.
pub fn mapping_report(records: &[AlignmentRecord], split: Split, level: usize, grid: &CorrespondenceGrid) -> MappingReport {
    let table = crate::stats::build_table(records, level, split, grid);
    let mut report = annotate_expectations(&table, grid);
    let subset: Vec<AlignmentRecord> = records.iter().filter(|r| split.admits(r.rel_type)).cloned().collect();
    report.yield_summary = Some(yield_summary(&subset));
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Rst(SenseLabel),
    /// Matches the sense and everything below it.
    Pdtb(SenseLabel),
    Flag(String),
}

impl Query {
    /// Resolves the label through the bundled taxonomy; unknown labels and
    /// flag names are errors.
    pub fn rst(raw: &str) -> Result<Query, String> {
        TaxonomyTable::bundled()
            .resolve_rst(raw)
            .map(Query::Rst)
            .map_err(|e| e.to_string())
    }

    pub fn pdtb(raw: &str) -> Result<Query, String> {
        TaxonomyTable::bundled()
            .resolve_pdtb(raw)
            .map(Query::Pdtb)
            .map_err(|e| e.to_string())
    }

    pub fn flag(raw: &str) -> Result<Query, String> {
        AlignmentFlag::NAMES
            .iter()
            .find(|n| n.eq_ignore_ascii_case(raw))
            .map(|n| Query::Flag(n.to_string()))
            .ok_or_else(|| format!("unknown flag {raw:?} (expected one of {})", AlignmentFlag::NAMES.join(", ")))
    }

    pub fn matches(&self, r: &AlignmentRecord) -> bool {
        let tax = TaxonomyTable::bundled();
        match self {
            Query::Rst(l) => r
                .rst_label
                .as_ref()
                .is_some_and(|x| tax.resolve(x).as_ref().unwrap_or(x) == l),
            Query::Pdtb(l) => r
                .senses
                .iter()
                .any(|s| is_descendant(l, tax.resolve(s).as_ref().unwrap_or(s)).unwrap_or(false)),
            Query::Flag(name) => r.has_flag(name),
        }
    }
}

pub fn query<'a>(records: &'a [AlignmentRecord], q: &Query) -> Vec<&'a AlignmentRecord> {
    records.iter().filter(|r| q.matches(r)).collect()
}

#[cfg(test)]
mod tests;
