//! PDTB sense hierarchy and RST-DT relation inventory.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::datafile;
use crate::model::normalize_relation_label;

const BUNDLED: &str = include_str!("../data/taxonomy.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Framework {
    #[serde(rename = "PDTB")]
    Pdtb,
    #[serde(rename = "RST")]
    Rst,
}

/// A relation label: a PDTB sense path of 1..3 segments or a single RST label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SenseLabel {
    framework: Framework,
    segments: Vec<String>,
}

impl SenseLabel {
    /// PDTB label split on dots, without consulting a taxonomy.
    pub fn pdtb_raw(raw: &str) -> Self {
        SenseLabel {
            framework: Framework::Pdtb,
            segments: raw
                .split('.')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        }
    }

    /// RST label normalized to lower case with hyphens, without consulting a taxonomy.
    pub fn rst_raw(raw: &str) -> Self {
        SenseLabel {
            framework: Framework::Rst,
            segments: vec![normalize_relation_label(raw)],
        }
    }

    pub fn framework(&self) -> Framework {
        self.framework
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn depth(&self) -> usize {
        self.segments.len()
    }

    pub fn is_rst(&self) -> bool {
        self.framework == Framework::Rst
    }
}

impl fmt::Display for SenseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}

impl Serialize for SenseLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("taxonomy data: {0}")]
    Data(String),
    #[error("level {level} exceeds depth {depth} of {label}")]
    LevelTooDeep { label: String, level: usize, depth: usize },
    #[error("level must be 1, 2 or 3, got {0}")]
    BadLevel(usize),
    #[error("unknown label {label:?}; nearest known: {}", nearest.join(", "))]
    UnknownLabel { label: String, nearest: Vec<String> },
    #[error("cannot compare labels across frameworks")]
    CrossFramework,
}

#[derive(Deserialize)]
struct PdtbNodeFile {
    name: String,
    #[serde(default)]
    children: Vec<PdtbNodeFile>,
}

#[derive(Deserialize)]
struct RstEntryFile {
    label: String,
    class: String,
}

#[derive(Deserialize)]
struct TaxonomyFile {
    version: String,
    checksum: String,
    pdtb: Vec<PdtbNodeFile>,
    pdtb_synthetic: Vec<String>,
    pdtb_aliases: HashMap<String, String>,
    rst: Vec<RstEntryFile>,
    rst_structural: Vec<RstEntryFile>,
    rst_suffixes: Vec<String>,
}

/// Both label inventories, loaded from a checksummed data file.
#[derive(Debug, Clone)]
pub struct TaxonomyTable {
    version: String,
    checksum: String,
    pdtb: Vec<Vec<String>>,
    pdtb_index: HashMap<String, usize>,
    synthetic: Vec<String>,
    aliases: HashMap<String, String>,
    rst: Vec<(String, String)>,
    rst_index: HashMap<String, usize>,
    rst_relations: usize,
    suffixes: Vec<String>,
}

fn key(segment: &str) -> String {
    segment
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

fn flatten(nodes: &[PdtbNodeFile], prefix: &[String], out: &mut Vec<Vec<String>>) {
    for n in nodes {
        let mut path = prefix.to_vec();
        path.push(n.name.clone());
        out.push(path.clone());
        flatten(&n.children, &path, out);
    }
}

impl TaxonomyTable {
    pub fn bundled() -> &'static TaxonomyTable {
        static TABLE: OnceLock<TaxonomyTable> = OnceLock::new();
        TABLE.get_or_init(|| TaxonomyTable::from_json(BUNDLED.as_bytes()).expect("bundled taxonomy is valid"))
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, TaxonomyError> {
        let doc = datafile::load_checked(bytes).map_err(TaxonomyError::Data)?;
        let file: TaxonomyFile = serde_json::from_value(doc).map_err(|e| TaxonomyError::Data(e.to_string()))?;
        let mut pdtb = Vec::new();
        flatten(&file.pdtb, &[], &mut pdtb);
        let pdtb_index = pdtb
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().map(|s| key(s)).collect::<Vec<_>>().join("."), i))
            .collect();
        let aliases = file.pdtb_aliases.iter().map(|(k, v)| (key(k), v.clone())).collect();
        let rst_relations = file.rst.len();
        let rst: Vec<(String, String)> = file
            .rst
            .into_iter()
            .chain(file.rst_structural)
            .map(|e| (normalize_relation_label(&e.label), e.class))
            .collect();
        let rst_index = rst.iter().enumerate().map(|(i, (l, _))| (l.clone(), i)).collect();
        let mut suffixes = file.rst_suffixes;
        suffixes.sort_by_key(|s| std::cmp::Reverse(s.len()));
        Ok(TaxonomyTable {
            version: file.version,
            checksum: file.checksum,
            pdtb,
            pdtb_index,
            synthetic: file.pdtb_synthetic,
            aliases,
            rst,
            rst_index,
            rst_relations,
            suffixes,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    /// The 4 classes, their types and subtypes in hierarchy order.
    pub fn pdtb_labels(&self) -> impl Iterator<Item = SenseLabel> + '_ {
        self.pdtb.iter().map(|p| SenseLabel {
            framework: Framework::Pdtb,
            segments: p.clone(),
        })
    }

    pub fn pdtb_synthetic(&self) -> &[String] {
        &self.synthetic
    }

    /// Relation labels (structural pseudo-labels excluded) with their class.
    pub fn rst_relations(&self) -> &[(String, String)] {
        &self.rst[..self.rst_relations]
    }

    /// Every RST label known, structural ones last.
    pub fn rst_labels(&self) -> impl Iterator<Item = &str> {
        self.rst.iter().map(|(l, _)| l.as_str())
    }

    pub fn rst_classes(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for (_, c) in self.rst_relations() {
            if !out.contains(&c.as_str()) {
                out.push(c);
            }
        }
        out
    }

    /// Canonical spelling of a PDTB sense.
    pub fn resolve_pdtb(&self, raw: &str) -> Result<SenseLabel, TaxonomyError> {
        let parts: Vec<String> = raw
            .split('.')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        if parts.len() == 1 {
            if let Some(s) = self.synthetic.iter().find(|s| key(s) == key(&parts[0])) {
                return Ok(SenseLabel {
                    framework: Framework::Pdtb,
                    segments: vec![s.clone()],
                });
            }
        }
        let path: Vec<String> = parts
            .iter()
            .map(|p| {
                let k = key(p);
                self.aliases.get(&k).map(|a| key(a)).unwrap_or(k)
            })
            .collect();
        match self.pdtb_index.get(&path.join(".")) {
            Some(&i) if !parts.is_empty() && parts.len() <= 3 => Ok(SenseLabel {
                framework: Framework::Pdtb,
                segments: self.pdtb[i].clone(),
            }),
            _ => {
                let names = self.pdtb.iter().map(|p| p.join(".")).chain(self.synthetic.iter().cloned());
                Err(TaxonomyError::UnknownLabel {
                    label: raw.to_string(),
                    nearest: nearest(raw, names),
                })
            }
        }
    }

    /// Canonical RST label; nuclearity/embedding suffixes collapse to the base label.
    pub fn resolve_rst(&self, raw: &str) -> Result<SenseLabel, TaxonomyError> {
        let label = normalize_relation_label(raw);
        if self.rst_index.contains_key(&label) {
            return Ok(SenseLabel::rst_raw(&label));
        }
        for suffix in &self.suffixes {
            if let Some(base) = label.strip_suffix(suffix.as_str()) {
                if self.rst_index.contains_key(base) {
                    return Ok(SenseLabel::rst_raw(base));
                }
            }
        }
        Err(TaxonomyError::UnknownLabel {
            label: raw.to_string(),
            nearest: nearest(&label, self.rst.iter().map(|(l, _)| l.clone())),
        })
    }

    pub fn resolve(&self, label: &SenseLabel) -> Result<SenseLabel, TaxonomyError> {
        match label.framework {
            Framework::Pdtb => self.resolve_pdtb(&label.to_string()),
            Framework::Rst => self.resolve_rst(&label.to_string()),
        }
    }

    pub fn is_known(&self, label: &SenseLabel) -> bool {
        self.resolve(label).is_ok()
    }

    pub fn rst_class(&self, label: &SenseLabel) -> Result<&str, TaxonomyError> {
        if label.framework != Framework::Rst {
            return Err(TaxonomyError::CrossFramework);
        }
        let canon = self.resolve_rst(&label.to_string())?;
        Ok(&self.rst[self.rst_index[&canon.segments[0]]].1)
    }

    /// Sort key following the hierarchy order; unknown labels sort last.
    pub fn rank(&self, label: &SenseLabel) -> usize {
        let fallback = self.pdtb.len() + self.synthetic.len() + self.rst.len();
        match self.resolve(label) {
            Ok(c) if c.framework == Framework::Pdtb => {
                let k = c.segments.iter().map(|s| key(s)).collect::<Vec<_>>().join(".");
                self.pdtb_index
                    .get(&k)
                    .copied()
                    .or_else(|| {
                        self.synthetic
                            .iter()
                            .position(|s| *s == c.segments[0])
                            .map(|p| self.pdtb.len() + p)
                    })
                    .unwrap_or(fallback)
            }
            Ok(c) => self.rst_index[&c.segments[0]],
            Err(_) => fallback,
        }
    }
}

/// Truncates a label to `level` segments.
pub fn generalize(label: &SenseLabel, level: usize) -> Result<SenseLabel, TaxonomyError> {
    if !(1..=3).contains(&level) {
        return Err(TaxonomyError::BadLevel(level));
    }
    if level > label.depth() {
        return Err(TaxonomyError::LevelTooDeep {
            label: label.to_string(),
            level,
            depth: label.depth(),
        });
    }
    Ok(SenseLabel {
        framework: label.framework,
        segments: label.segments[..level].to_vec(),
    })
}

/// Truncates to `level` segments, leaving shallower labels unchanged.
pub fn generalize_at_most(label: &SenseLabel, level: usize) -> SenseLabel {
    SenseLabel {
        framework: label.framework,
        segments: label.segments[..level.min(label.depth())].to_vec(),
    }
}

/// True iff `a` is an ancestor of (or equal to) `b`.
pub fn is_descendant(a: &SenseLabel, b: &SenseLabel) -> Result<bool, TaxonomyError> {
    if a.framework != b.framework {
        return Err(TaxonomyError::CrossFramework);
    }
    Ok(a.segments.len() <= b.segments.len() && a.segments.iter().zip(&b.segments).all(|(x, y)| key(x) == key(y)))
}

fn nearest<I: IntoIterator<Item = String>>(raw: &str, names: I) -> Vec<String> {
    let target = raw.to_lowercase();
    let mut scored: Vec<(usize, String)> = names
        .into_iter()
        .map(|n| (levenshtein(&target, &n.to_lowercase()), n))
        .collect();
    scored.sort();
    scored.into_iter().take(3).map(|(_, n)| n).collect()
}

fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != *cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}
