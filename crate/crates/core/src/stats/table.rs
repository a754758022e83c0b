use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alignment::AlignmentRecord;
use crate::mapping::CorrespondenceGrid;
use crate::model::RelType;
use crate::taxonomy::{generalize_at_most, SenseLabel, TaxonomyTable};

use super::StatsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Explicit,
    Implicit,
    All,
}

impl Split {
    /// Implicit covers EntRel and NoRel as well; AltLex only shows up under All.
    pub fn admits(&self, t: RelType) -> bool {
        match self {
            Split::Explicit => t == RelType::Explicit,
            Split::Implicit => matches!(t, RelType::Implicit | RelType::EntRel | RelType::NoRel),
            Split::All => true,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Explicit => "explicit",
            Split::Implicit => "implicit",
            Split::All => "all",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "explicit" => Ok(Split::Explicit),
            "implicit" => Ok(Split::Implicit),
            "all" => Ok(Split::All),
            other => Err(format!("unknown split {other:?} (expected explicit, implicit or all)")),
        }
    }
}

/// PDTB senses (rows) against RST labels (columns).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    pub row_labels: Vec<SenseLabel>,
    pub col_labels: Vec<SenseLabel>,
    pub counts: Vec<Vec<u64>>,
    pub split: Split,
    pub level: usize,
}

impl ContingencyTable {
    pub fn new(
        row_labels: Vec<SenseLabel>,
        col_labels: Vec<SenseLabel>,
        counts: Vec<Vec<u64>>,
        split: Split,
        level: usize,
    ) -> Result<Self, StatsError> {
        if counts.len() != row_labels.len() || counts.iter().any(|r| r.len() != col_labels.len()) {
            return Err(StatsError::Shape);
        }
        Ok(ContingencyTable {
            row_labels,
            col_labels,
            counts,
            split,
            level,
        })
    }

    pub fn row_totals(&self) -> Vec<u64> {
        row_totals(&self.counts)
    }

    pub fn col_totals(&self) -> Vec<u64> {
        col_totals(&self.counts, self.col_labels.len())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.row_labels.is_empty() && self.col_labels.is_empty()
    }

    pub fn transpose(&self) -> ContingencyTable {
        let counts = (0..self.col_labels.len())
            .map(|j| self.counts.iter().map(|r| r[j]).collect())
            .collect();
        ContingencyTable {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            counts,
            split: self.split,
            level: self.level,
        }
    }

    /// Copy without all-zero rows and columns.
    pub fn drop_empty(&self) -> ContingencyTable {
        let rows: Vec<usize> = (0..self.row_labels.len())
            .filter(|&i| self.counts[i].iter().any(|&x| x > 0))
            .collect();
        let cols: Vec<usize> = (0..self.col_labels.len())
            .filter(|&j| self.counts.iter().any(|r| r[j] > 0))
            .collect();
        ContingencyTable {
            row_labels: rows.iter().map(|&i| self.row_labels[i].clone()).collect(),
            col_labels: cols.iter().map(|&j| self.col_labels[j].clone()).collect(),
            counts: rows
                .iter()
                .map(|&i| cols.iter().map(|&j| self.counts[i][j]).collect())
                .collect(),
            split: self.split,
            level: self.level,
        }
    }

    pub fn count(&self, row: &str, col: &str) -> u64 {
        let i = self.row_labels.iter().position(|l| l.to_string() == row);
        let j = self.col_labels.iter().position(|l| l.to_string() == col);
        match (i, j) {
            (Some(i), Some(j)) => self.counts[i][j],
            _ => 0,
        }
    }

    /// Tab-separated table with a trailing total column and row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("pdtb\\rst");
        for c in &self.col_labels {
            out.push('\t');
            out.push_str(&c.to_string());
        }
        out.push_str("\ttotal\n");
        for (label, (row, total)) in self.row_labels.iter().zip(self.counts.iter().zip(self.row_totals())) {
            out.push_str(&label.to_string());
            for x in row {
                out.push_str(&format!("\t{x}"));
            }
            out.push_str(&format!("\t{total}\n"));
        }
        out.push_str("total");
        for x in self.col_totals() {
            out.push_str(&format!("\t{x}"));
        }
        out.push_str(&format!("\t{}\n", self.total()));
        out
    }
}

pub(crate) fn row_totals(counts: &[Vec<u64>]) -> Vec<u64> {
    counts.iter().map(|r| r.iter().sum()).collect()
}

pub(crate) fn col_totals(counts: &[Vec<u64>], cols: usize) -> Vec<u64> {
    (0..cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect()
}

/// The single PDTB sense a record contributes: the one the grid predicts
/// best for its RST label, cut to at most `level` segments.
pub fn record_sense(record: &AlignmentRecord, level: usize, grid: &CorrespondenceGrid) -> Option<SenseLabel> {
    let rst = record.rst_label.as_ref()?;
    if record.senses.is_empty() {
        return None;
    }
    let tax = TaxonomyTable::bundled();
    let senses: Vec<SenseLabel> = record
        .senses
        .iter()
        .map(|s| tax.resolve(s).unwrap_or_else(|_| s.clone()))
        .collect();
    Some(generalize_at_most(grid.select_closest_sense(&senses, rst), level))
}

/// Counts (sense, RST label) pairs over records that take part in the analysis.
pub fn build_table(records: &[AlignmentRecord], level: usize, split: Split, grid: &CorrespondenceGrid) -> ContingencyTable {
    let tax = TaxonomyTable::bundled();
    let mut cells: BTreeMap<(SenseLabel, SenseLabel), u64> = BTreeMap::new();
    for r in records.iter().filter(|r| r.in_analysis && split.admits(r.rel_type)) {
        if let (Some(sense), Some(rst)) = (record_sense(r, level, grid), r.rst_label.clone()) {
            *cells.entry((sense, rst)).or_default() += 1;
        }
    }
    let sorted = |mut v: Vec<SenseLabel>| {
        v.sort_by(|a, b| tax.rank(a).cmp(&tax.rank(b)).then_with(|| a.cmp(b)));
        v.dedup();
        v
    };
    let rows = sorted(cells.keys().map(|(s, _)| s.clone()).collect());
    let cols = sorted(cells.keys().map(|(_, r)| r.clone()).collect());
    let counts = rows
        .iter()
        .map(|s| {
            cols.iter()
                .map(|r| cells.get(&(s.clone(), r.clone())).copied().unwrap_or(0))
                .collect()
        })
        .collect();
    ContingencyTable {
        row_labels: rows,
        col_labels: cols,
        counts,
        split,
        level,
    }
}
