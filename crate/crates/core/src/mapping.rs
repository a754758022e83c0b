//! The three theoretical RST/PDTB correspondence proposals and the CCR
//! dimension profiles, plus expectation lookups over observed label pairs.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datafile;
use crate::taxonomy::{is_descendant, Framework, SenseLabel, TaxonomyError, TaxonomyTable};

const BUNDLED_GRID: &str = include_str!("../data/grid.json");
const BUNDLED_CCR: &str = include_str!("../data/ccr.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Proposal {
    Olia,
    UniDim,
    Iso,
}

impl Proposal {
    pub const ALL: [Proposal; 3] = [Proposal::Olia, Proposal::UniDim, Proposal::Iso];

    pub fn code(self) -> char {
        match self {
            Proposal::Olia => 'o',
            Proposal::UniDim => 'u',
            Proposal::Iso => 'i',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Proposal::Olia => "OLiA",
            Proposal::UniDim => "UniDim",
            Proposal::Iso => "ISO",
        }
    }

    fn from_code(c: &str) -> Option<Proposal> {
        match c {
            "o" => Some(Proposal::Olia),
            "u" => Some(Proposal::UniDim),
            "i" => Some(Proposal::Iso),
            _ => None,
        }
    }
}

/// Subset of the three proposals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Proposals(u8);

impl Proposals {
    pub fn of(items: &[Proposal]) -> Self {
        let mut p = Proposals::default();
        for &x in items {
            p.insert(x);
        }
        p
    }

    pub fn insert(&mut self, p: Proposal) {
        self.0 |= 1 << p as u8;
    }

    pub fn contains(&self, p: Proposal) -> bool {
        self.0 & (1 << p as u8) != 0
    }

    pub fn union(self, other: Proposals) -> Proposals {
        Proposals(self.0 | other.0)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Proposal> + '_ {
        Proposal::ALL.into_iter().filter(|p| self.contains(*p))
    }

    pub fn level(&self) -> ExpectationLevel {
        match self.len() {
            3 => ExpectationLevel::All3,
            2 => ExpectationLevel::TwoOfThree,
            1 => ExpectationLevel::OneProposal,
            _ => ExpectationLevel::Unexpected,
        }
    }
}

impl fmt::Display for Proposals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<String> = self.iter().map(|p| p.code().to_string()).collect();
        write!(f, "{{{}}}", codes.join(","))
    }
}

impl Serialize for Proposals {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let codes: Vec<String> = self.iter().map(|p| p.code().to_string()).collect();
        codes.serialize(s)
    }
}

/// How many proposals predict a label pair; variants are ordered strongest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExpectationLevel {
    All3,
    TwoOfThree,
    OneProposal,
    Unexpected,
}

impl ExpectationLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExpectationLevel::All3 => "All3",
            ExpectationLevel::TwoOfThree => "TwoOfThree",
            ExpectationLevel::OneProposal => "OneProposal",
            ExpectationLevel::Unexpected => "Unexpected",
        }
    }
}

impl fmt::Display for ExpectationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MappingError {
    #[error("mapping data: {0}")]
    Data(String),
    #[error("grid label {label:?} does not resolve: {source}")]
    Dangling { label: String, source: TaxonomyError },
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error("{0} is a PDTB label; an RST label is required")]
    NotRst(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridEntry {
    pub rst: SenseLabel,
    pub pdtb: SenseLabel,
    pub proposals: Proposals,
    pub disputed: bool,
}

#[derive(Deserialize)]
struct GridFile {
    version: String,
    checksum: String,
    rows: Vec<String>,
    entries: Vec<RawEntry>,
    rst_not_mapped: Vec<RawNotMapped>,
    pdtb_not_mapped: Vec<RawNotMapped>,
    excluded_rst: Vec<String>,
}

#[derive(Deserialize)]
struct RawEntry {
    rst: String,
    pdtb: String,
    proposals: Vec<String>,
    #[serde(default)]
    disputed: bool,
}

#[derive(Deserialize)]
struct RawNotMapped {
    #[serde(alias = "pdtb")]
    rst: String,
    proposals: Vec<String>,
}

/// Expected RST/PDTB label pairs with per-proposal provenance.
#[derive(Clone, Debug)]
pub struct CorrespondenceGrid {
    version: String,
    checksum: String,
    rows: Vec<SenseLabel>,
    entries: Vec<GridEntry>,
    rst_not_mapped: Vec<(SenseLabel, Proposals)>,
    pdtb_not_mapped: Vec<(SenseLabel, Proposals)>,
    excluded: Vec<SenseLabel>,
}

fn proposals(codes: &[String]) -> Result<Proposals, MappingError> {
    let mut p = Proposals::default();
    for c in codes {
        p.insert(Proposal::from_code(c).ok_or_else(|| MappingError::Data(format!("unknown proposal code {c:?}")))?);
    }
    if p.is_empty() {
        return Err(MappingError::Data("entry without proposals".into()));
    }
    Ok(p)
}

fn resolve(tax: &TaxonomyTable, raw: &str, framework: Framework) -> Result<SenseLabel, MappingError> {
    let r = match framework {
        Framework::Pdtb => tax.resolve_pdtb(raw),
        Framework::Rst => tax.resolve_rst(raw),
    };
    r.map_err(|source| MappingError::Dangling {
        label: raw.to_string(),
        source,
    })
}

impl CorrespondenceGrid {
    pub fn bundled() -> &'static CorrespondenceGrid {
        static GRID: OnceLock<CorrespondenceGrid> = OnceLock::new();
        GRID.get_or_init(|| {
            CorrespondenceGrid::from_json(BUNDLED_GRID.as_bytes(), TaxonomyTable::bundled()).expect("bundled grid is valid")
        })
    }

    /// Loads a grid file, verifying its checksum and that every label resolves.
    pub fn from_json(bytes: &[u8], tax: &TaxonomyTable) -> Result<Self, MappingError> {
        let doc = datafile::load_checked(bytes).map_err(MappingError::Data)?;
        let file: GridFile = serde_json::from_value(doc).map_err(|e| MappingError::Data(e.to_string()))?;
        let rst = |raw: &str| resolve(tax, raw, Framework::Rst);
        let pdtb = |raw: &str| resolve(tax, raw, Framework::Pdtb);
        let entries = file
            .entries
            .iter()
            .map(|e| {
                Ok(GridEntry {
                    rst: rst(&e.rst)?,
                    pdtb: pdtb(&e.pdtb)?,
                    proposals: proposals(&e.proposals)?,
                    disputed: e.disputed,
                })
            })
            .collect::<Result<Vec<_>, MappingError>>()?;
        Ok(CorrespondenceGrid {
            version: file.version,
            checksum: file.checksum,
            rows: file.rows.iter().map(|r| rst(r)).collect::<Result<_, _>>()?,
            entries,
            rst_not_mapped: file
                .rst_not_mapped
                .iter()
                .map(|n| Ok((rst(&n.rst)?, proposals(&n.proposals)?)))
                .collect::<Result<_, MappingError>>()?,
            pdtb_not_mapped: file
                .pdtb_not_mapped
                .iter()
                .map(|n| Ok((pdtb(&n.rst)?, proposals(&n.proposals)?)))
                .collect::<Result<_, MappingError>>()?,
            excluded: file.excluded_rst.iter().map(|r| rst(r)).collect::<Result<_, _>>()?,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    /// RST labels in table order.
    pub fn rows(&self) -> &[SenseLabel] {
        &self.rows
    }

    pub fn entries(&self) -> &[GridEntry] {
        &self.entries
    }

    /// RST labels some proposal explicitly leaves unmapped.
    pub fn rst_not_mapped(&self) -> &[(SenseLabel, Proposals)] {
        &self.rst_not_mapped
    }

    pub fn pdtb_not_mapped(&self) -> &[(SenseLabel, Proposals)] {
        &self.pdtb_not_mapped
    }

    /// RST labels the grid leaves out of the comparison altogether.
    pub fn excluded(&self) -> &[SenseLabel] {
        &self.excluded
    }

    pub fn is_excluded(&self, rst: &SenseLabel) -> bool {
        self.excluded.iter().any(|e| e == rst)
    }

    pub fn is_disputed(&self, rst: &SenseLabel) -> bool {
        self.entries.iter().any(|e| e.disputed && &e.rst == rst)
    }

    /// Disputed RST labels in table order.
    pub fn disputed_rows(&self) -> Vec<SenseLabel> {
        self.rows.iter().filter(|r| self.is_disputed(r)).cloned().collect()
    }

    /// Grid entries for an RST label, at their printed granularity.
    pub fn expected_for(&self, rst: &SenseLabel) -> Result<Vec<(SenseLabel, Proposals)>, MappingError> {
        let rst = self.canonical_rst(rst)?;
        Ok(self
            .entries
            .iter()
            .filter(|e| e.rst == rst)
            .map(|e| (e.pdtb.clone(), e.proposals))
            .collect())
    }

    /// Grid entries for a PDTB label, at their printed granularity.
    pub fn expected_for_pdtb(&self, pdtb: &SenseLabel) -> Result<Vec<(SenseLabel, Proposals)>, MappingError> {
        let pdtb = TaxonomyTable::bundled().resolve(pdtb)?;
        Ok(self
            .entries
            .iter()
            .filter(|e| e.pdtb == pdtb)
            .map(|e| (e.rst.clone(), e.proposals))
            .collect())
    }

    fn canonical_rst(&self, rst: &SenseLabel) -> Result<SenseLabel, MappingError> {
        if !rst.is_rst() {
            return Err(MappingError::NotRst(rst.to_string()));
        }
        Ok(TaxonomyTable::bundled().resolve(rst)?)
    }

    /// Proposals predicting the pair. A finer PDTB label inherits entries
    /// printed for its ancestors; a coarser one collects the entries of its
    /// descendants.
    pub fn proposals_for(&self, rst: &SenseLabel, pdtb: &SenseLabel) -> Proposals {
        let tax = TaxonomyTable::bundled();
        let rst = tax.resolve(rst).unwrap_or_else(|_| rst.clone());
        let pdtb = tax.resolve(pdtb).unwrap_or_else(|_| pdtb.clone());
        self.entries
            .iter()
            .filter(|e| e.rst == rst)
            .filter(|e| is_descendant(&e.pdtb, &pdtb).unwrap_or(false) || is_descendant(&pdtb, &e.pdtb).unwrap_or(false))
            .fold(Proposals::default(), |acc, e| acc.union(e.proposals))
    }

    pub fn expectation_level(&self, rst: &SenseLabel, pdtb: &SenseLabel) -> ExpectationLevel {
        self.proposals_for(rst, pdtb).level()
    }

    /// The sense most strongly predicted for `rst`; the first listed wins ties.
    pub fn select_closest_sense<'a>(&self, senses: &'a [SenseLabel], rst: &SenseLabel) -> &'a SenseLabel {
        senses
            .iter()
            .min_by_key(|s| self.expectation_level(rst, s))
            .expect("at least one sense")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasicOperation {
    Causal,
    Additive,
    Conditional,
    Temporal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Objective,
    Subjective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentOrder {
    Forward,
    Backward,
    None,
}

/// Values of the four core coherence dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CcrProfile {
    pub polarity: Polarity,
    pub basic_operation: BasicOperation,
    pub source: Source,
    pub order: SegmentOrder,
}

impl CcrProfile {
    /// Number of dimensions on which two profiles disagree.
    pub fn distance(&self, other: &CcrProfile) -> usize {
        [
            self.polarity != other.polarity,
            self.basic_operation != other.basic_operation,
            self.source != other.source,
            self.order != other.order,
        ]
        .iter()
        .filter(|d| **d)
        .count()
    }
}

#[derive(Deserialize)]
struct CcrFile {
    version: String,
    profiles: Vec<RawProfile>,
}

#[derive(Deserialize)]
struct RawProfile {
    framework: Framework,
    label: String,
    #[serde(flatten)]
    profile: CcrProfile,
}

#[derive(Clone, Debug)]
pub struct CcrTable {
    version: String,
    profiles: Vec<(SenseLabel, CcrProfile)>,
}

impl CcrTable {
    pub fn bundled() -> &'static CcrTable {
        static TABLE: OnceLock<CcrTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            CcrTable::from_json(BUNDLED_CCR.as_bytes(), TaxonomyTable::bundled()).expect("bundled profiles are valid")
        })
    }

    pub fn from_json(bytes: &[u8], tax: &TaxonomyTable) -> Result<Self, MappingError> {
        let doc = datafile::load_checked(bytes).map_err(MappingError::Data)?;
        let file: CcrFile = serde_json::from_value(doc).map_err(|e| MappingError::Data(e.to_string()))?;
        let profiles = file
            .profiles
            .into_iter()
            .map(|p| Ok((resolve(tax, &p.label, p.framework)?, p.profile)))
            .collect::<Result<_, MappingError>>()?;
        Ok(CcrTable {
            version: file.version,
            profiles,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Profile of exactly this label; `None` when unprofiled.
    pub fn profile(&self, label: &SenseLabel) -> Option<CcrProfile> {
        let label = TaxonomyTable::bundled().resolve(label).ok()?;
        self.profiles.iter().find(|(l, _)| *l == label).map(|(_, p)| *p)
    }
}

pub fn ccr_profile(label: &SenseLabel) -> Option<CcrProfile> {
    CcrTable::bundled().profile(label)
}
