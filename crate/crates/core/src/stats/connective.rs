use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::alignment::AlignmentRecord;
use crate::mapping::CorrespondenceGrid;
use crate::model::RelType;
use crate::taxonomy::SenseLabel;

use super::inference::{cohen_kappa, independence_test, FisherOptions, TestResult};
use super::table::record_sense;
use super::StatsError;

/// Lower-cases, trims and collapses internal whitespace; multi-word
/// connectives stay whole.
pub fn normalize_connective(raw: &str) -> String {
    raw.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

/// Per-connective sampling seed, independent of scheduling order.
pub fn connective_seed(seed: u64, connective: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(connective.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

#[derive(Clone, Debug)]
pub struct ConnectiveOptions {
    pub min_n: usize,
    /// PDTB sense depth used for the rows.
    pub level: usize,
    pub fisher: FisherOptions,
    /// Also count implicit relations under their inserted connective.
    pub include_implicit: bool,
    pub kappa_space: KappaSpace,
}

impl Default for ConnectiveOptions {
    fn default() -> Self {
        ConnectiveOptions {
            min_n: 10,
            level: 2,
            fisher: FisherOptions::default(),
            include_implicit: false,
            kappa_space: KappaSpace::contrast_concession(),
        }
    }
}

/// Maps PDTB senses and RST labels into one shared label set for κ.
/// Labels matching no rule are left out of the agreement table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaSpace {
    /// (PDTB prefix, shared label)
    pub pdtb: Vec<(String, String)>,
    /// (RST label, shared label)
    pub rst: Vec<(String, String)>,
}

impl KappaSpace {
    pub fn contrast_concession() -> Self {
        let s = |a: &str, b: &str| (a.to_string(), b.to_string());
        KappaSpace {
            pdtb: vec![s("Comparison.Contrast", "contrast"), s("Comparison.Concession", "concession")],
            rst: vec![
                s("contrast", "contrast"),
                s("concession", "concession"),
                s("antithesis", "concession"),
            ],
        }
    }

    pub fn map_pdtb(&self, sense: &SenseLabel) -> Option<&str> {
        let s = sense.to_string();
        self.pdtb
            .iter()
            .find(|(p, _)| s == *p || s.starts_with(&format!("{p}.")))
            .map(|(_, shared)| shared.as_str())
    }

    pub fn map_rst(&self, label: &SenseLabel) -> Option<&str> {
        let s = label.to_string();
        self.rst.iter().find(|(r, _)| s == *r).map(|(_, shared)| shared.as_str())
    }
}

/// κ over paired labels, optionally keeping only pairs with both labels in `subset`.
pub fn kappa_from_pairs(pairs: &[(String, String)], subset: Option<&[&str]>) -> Result<f64, StatsError> {
    let keep = |l: &str| subset.is_none_or(|s| s.contains(&l));
    let kept: Vec<&(String, String)> = pairs.iter().filter(|(a, b)| keep(a) && keep(b)).collect();
    let labels: Vec<&str> = kept
        .iter()
        .flat_map(|(a, b)| [a.as_str(), b.as_str()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let idx = |l: &str| labels.iter().position(|x| *x == l).expect("label present");
    let mut t = vec![vec![0u64; labels.len()]; labels.len()];
    for (a, b) in kept {
        t[idx(a)][idx(b)] += 1;
    }
    cohen_kappa(&t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectiveTest {
    pub connective: String,
    pub n: usize,
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<TestResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

fn cross_tab(pairs: &[(SenseLabel, SenseLabel)]) -> (Vec<String>, Vec<String>, Vec<Vec<u64>>) {
    let rows: Vec<String> = pairs
        .iter()
        .map(|(s, _)| s.to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let cols: Vec<String> = pairs
        .iter()
        .map(|(_, r)| r.to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut counts = vec![vec![0u64; cols.len()]; rows.len()];
    for (s, r) in pairs {
        let i = rows.binary_search(&s.to_string()).expect("row present");
        let j = cols.binary_search(&r.to_string()).expect("col present");
        counts[i][j] += 1;
    }
    (rows, cols, counts)
}

/// Independence of PDTB sense and RST label, connective by connective.
/// Connectives with fewer than `min_n` instances are reported as skipped.
pub fn connective_tests(records: &[AlignmentRecord], grid: &CorrespondenceGrid, opts: &ConnectiveOptions) -> Vec<ConnectiveTest> {
    let mut groups: BTreeMap<String, Vec<(SenseLabel, SenseLabel)>> = BTreeMap::new();
    for r in records {
        let eligible = r.rel_type == RelType::Explicit || (opts.include_implicit && r.rel_type == RelType::Implicit);
        if !eligible || !r.in_analysis {
            continue;
        }
        let conn = normalize_connective(&r.connective);
        if conn.is_empty() {
            continue;
        }
        if let (Some(sense), Some(rst)) = (record_sense(r, opts.level, grid), r.rst_label.clone()) {
            groups.entry(conn).or_default().push((sense, rst));
        }
    }
    let groups: Vec<(String, Vec<(SenseLabel, SenseLabel)>)> = groups.into_iter().collect();
    groups
        .par_iter()
        .map(|(conn, pairs)| {
            let (rows, cols, counts) = cross_tab(pairs);
            let n = pairs.len();
            if n < opts.min_n {
                return ConnectiveTest {
                    connective: conn.clone(),
                    n,
                    skipped: true,
                    result: None,
                    kappa: None,
                    rows,
                    cols,
                    counts,
                };
            }
            let fisher = FisherOptions {
                seed: connective_seed(opts.fisher.seed, conn),
                ..opts.fisher
            };
            let shared: Vec<(String, String)> = pairs
                .iter()
                .filter_map(|(s, r)| {
                    Some((
                        opts.kappa_space.map_pdtb(s)?.to_string(),
                        opts.kappa_space.map_rst(r)?.to_string(),
                    ))
                })
                .collect();
            ConnectiveTest {
                connective: conn.clone(),
                n,
                skipped: false,
                result: independence_test(&counts, &fisher).ok(),
                kappa: kappa_from_pairs(&shared, None).ok(),
                rows,
                cols,
                counts,
            }
        })
        .collect()
}
