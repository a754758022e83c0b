use std::fmt::Write;

use crate::mapping::ExpectationLevel;
use crate::stats::Split;

use super::{fmt_pct, LabelSummary, MappingReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    /// Rows and columns with fewer relations are merged into "other".
    pub other_threshold: u64,
}

impl RenderOptions {
    pub fn for_split(split: Split) -> Self {
        RenderOptions {
            other_threshold: match split {
                Split::Implicit => 20,
                Split::Explicit | Split::All => 30,
            },
        }
    }
}

const OTHER: &str = "other";

/// Cell text with its expectation marker.
fn mark(n: u64, level: Option<ExpectationLevel>) -> String {
    if n == 0 {
        return "0".into();
    }
    match level {
        Some(ExpectationLevel::All3) => format!("**{n}**"),
        Some(ExpectationLevel::TwoOfThree) => format!("*{n}*"),
        Some(ExpectationLevel::OneProposal) => format!("{n}'"),
        _ => n.to_string(),
    }
}

/// Indices kept as their own line, and whether an "other" line is needed.
fn keep(totals: &[u64], threshold: u64) -> (Vec<usize>, bool) {
    let kept: Vec<usize> = (0..totals.len()).filter(|&i| totals[i] >= threshold).collect();
    let merged = kept.len() < totals.len();
    (kept, merged)
}

fn push_row(out: &mut String, cells: &[String]) {
    out.push('|');
    for c in cells {
        let _ = write!(out, " {c} |");
    }
    out.push('\n');
}

/// `align` holds one `l` or `r` per column.
fn push_rule(out: &mut String, align: &str) {
    out.push('|');
    for a in align.chars() {
        out.push_str(if a == 'l' { "---|" } else { "---:|" });
    }
    out.push('\n');
}

fn table_section(out: &mut String, r: &MappingReport, opts: &RenderOptions) {
    let t = &r.table;
    let rows = t.row_totals();
    let cols = t.col_totals();
    let (kr, other_row) = keep(&rows, opts.other_threshold);
    let (kc, other_col) = keep(&cols, opts.other_threshold);

    let _ = writeln!(
        out,
        "Legend: **n** predicted by all three proposals, *n* by two, n' by one, plain n by none.\n"
    );
    if other_row || other_col {
        let _ = writeln!(
            out,
            "Rows and columns with fewer than {} relations are merged into \"{OTHER}\".\n",
            opts.other_threshold
        );
    }

    let mut header = vec!["pdtb \\ rst".to_string()];
    header.extend(kc.iter().map(|&j| t.col_labels[j].to_string()));
    if other_col {
        header.push(OTHER.into());
    }
    header.push("total".into());
    push_row(out, &header);
    push_rule(out, &format!("l{}", "r".repeat(header.len() - 1)));

    let line = |label: String, counts: &dyn Fn(usize) -> u64, level: &dyn Fn(usize) -> Option<ExpectationLevel>, total: u64| {
        let mut cells = vec![label];
        cells.extend(kc.iter().map(|&j| mark(counts(j), level(j))));
        if other_col {
            let rest: u64 = (0..cols.len()).filter(|j| !kc.contains(j)).map(counts).sum();
            cells.push(rest.to_string());
        }
        cells.push(total.to_string());
        cells
    };
    for &i in &kr {
        let cells = line(
            t.row_labels[i].to_string(),
            &|j| t.counts[i][j],
            &|j| Some(r.cell_expectations[i][j]),
            rows[i],
        );
        push_row(out, &cells);
    }
    if other_row {
        let merged: Vec<usize> = (0..rows.len()).filter(|i| !kr.contains(i)).collect();
        let total = merged.iter().map(|&i| rows[i]).sum();
        let cells = line(
            OTHER.into(),
            &|j| merged.iter().map(|&i| t.counts[i][j]).sum(),
            &|_| None,
            total,
        );
        push_row(out, &cells);
    }
    let cells = line("total".into(), &|j| cols[j], &|_| None, t.total());
    push_row(out, &cells);
    out.push('\n');
}

fn summary_section(out: &mut String, title: &str, head: &str, summaries: &[LabelSummary]) {
    let _ = writeln!(out, "## {title}\n");
    push_row(out, &[head.into(), "relations".into(), "most frequent counterparts".into()]);
    push_rule(out, "lrl");
    for s in summaries {
        let top: Vec<String> = s
            .distribution
            .iter()
            .take(3)
            .map(|sh| format!("{} {}", sh.label, fmt_pct(sh.pct)))
            .collect();
        push_row(out, &[s.label.clone(), s.total.to_string(), top.join(", ")]);
    }
    out.push('\n');
}

pub fn render_markdown(r: &MappingReport, opts: &RenderOptions) -> String {
    let t = &r.table;
    let mut out = String::from("# Mapping report\n\n");
    let _ = writeln!(out, "- split: {}", t.split);
    let _ = writeln!(out, "- PDTB level: {}", t.level);
    let _ = writeln!(out, "- grid: {}", r.grid_version);
    let _ = writeln!(out, "- relations in table: {}\n", t.total());

    if let Some(y) = &r.yield_summary {
        out.push_str("## Yield\n\n");
        push_row(
            &mut out,
            &[
                "relations".into(),
                "mapped".into(),
                "exact of mapped".into(),
                "flagged".into(),
                "unalignable".into(),
            ],
        );
        push_rule(&mut out, "rrrrr");
        push_row(
            &mut out,
            &[
                y.total.to_string(),
                format!("{} ({})", y.mapped, fmt_pct(y.mapped_pct)),
                format!("{} ({})", y.exact, fmt_pct(y.exact_pct)),
                format!("{} ({})", y.flagged, fmt_pct(y.flagged_pct)),
                y.unalignable.to_string(),
            ],
        );
        out.push('\n');
        if !y.flag_histogram.is_empty() {
            push_row(&mut out, &["flag".into(), "records".into()]);
            push_rule(&mut out, "lr");
            for (k, v) in &y.flag_histogram {
                push_row(&mut out, &[k.clone(), v.to_string()]);
            }
            out.push('\n');
        }
    }

    out.push_str("## Observed vs expected\n\n");
    if t.total() == 0 {
        out.push_str("No relations in the analysis.\n\n");
    } else {
        table_section(&mut out, r, opts);
        out.push_str("## Expectation levels\n\n");
        push_row(&mut out, &["level".into(), "relations".into(), "share".into()]);
        push_rule(&mut out, "lrr");
        for (lvl, n) in &r.level_totals {
            push_row(
                &mut out,
                &[lvl.to_string(), n.to_string(), fmt_pct(*n as f64 / t.total() as f64)],
            );
        }
        out.push('\n');
    }

    if !r.disputed_rows.is_empty() {
        out.push_str("## Disputed labels\n\n");
        push_row(
            &mut out,
            &["rst".into(), "relations".into(), "1st".into(), "2nd".into(), "3rd".into()],
        );
        push_rule(&mut out, "lrlll");
        for d in &r.disputed_rows {
            let mut cells = vec![d.rst.clone(), d.total.to_string()];
            for k in 0..3 {
                cells.push(d.top.get(k).map_or("-".into(), |s| {
                    format!("{} {} ({}, {})", s.pdtb, s.count, fmt_pct(s.pct), s.expectation)
                }));
            }
            push_row(&mut out, &cells);
        }
        out.push('\n');
    }

    if t.total() > 0 {
        summary_section(&mut out, "PDTB senses", "sense", &r.pdtb_summaries);
        summary_section(&mut out, "RST labels", "label", &r.rst_summaries);
    }

    if !r.notes.is_empty() {
        out.push_str("## Notes\n\n");
        for n in &r.notes {
            let _ = writeln!(out, "- {n}");
        }
        out.push('\n');
    }
    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}

/// The full report; nothing is merged.
pub fn render_json(r: &MappingReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}
