//! Readers and writers for the two annotation layers and the corpus manifest.

mod dis;
mod pdtb_jsonl;
mod rst_json;

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::model::{Document, ModelError, RstTree};
use crate::taxonomy::TaxonomyTable;

pub use dis::{parse_rst_dis, serialize_rst_dis};
pub use pdtb_jsonl::{parse_pdtb_jsonl, parse_pdtb_jsonl_with, serialize_pdtb_jsonl, PdtbEntry};
pub use rst_json::{parse_rst_json, parse_rst_json_in, serialize_rst_json, RstFile};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid value at line {line}, column {column}: {message}")]
    Data { line: usize, column: usize, message: String },
    #[error("syntax error at offset {offset}: {message}")]
    DisSyntax { offset: usize, message: String },
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("EDU text not found in document (EDU {edu}: {text:?})")]
    EduTextNotFound { edu: u32, text: String },
    #[error("line {line}: {source}")]
    Line { line: usize, source: Box<IngestError> },
    #[error("duplicate rel_id {0:?}")]
    DuplicateRelId(String),
    #[error("duplicate doc_id {0:?} in manifest")]
    DuplicateDocId(String),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("doc_id mismatch in {path}: expected {expected:?}, found {found:?}")]
    DocIdMismatch { path: String, expected: String, found: String },
}

impl IngestError {
    fn from_json(e: serde_json::Error) -> Self {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        match e.classify() {
            serde_json::error::Category::Data => IngestError::Data { line, column, message },
            _ => IngestError::Syntax { line, column, message },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub doc_id: String,
    pub text: PathBuf,
    pub rst: PathBuf,
    pub pdtb: PathBuf,
}

/// Manifest entries with paths resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let bytes = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&bytes, base)
    }

    pub fn from_json(bytes: &[u8], base: &Path) -> Result<Self, IngestError> {
        let mut entries: Vec<ManifestEntry> = serde_json::from_slice(bytes).map_err(IngestError::from_json)?;
        let mut seen = HashSet::new();
        for e in &mut entries {
            if !seen.insert(e.doc_id.clone()) {
                return Err(IngestError::DuplicateDocId(e.doc_id.clone()));
            }
            e.text = base.join(&e.text);
            e.rst = base.join(&e.rst);
            e.pdtb = base.join(&e.pdtb);
        }
        Ok(CorpusManifest { entries })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocFailure {
    pub doc_id: String,
    pub error: IngestError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSense {
    pub doc_id: String,
    pub rel_id: String,
    pub sense: String,
}

#[derive(Debug, Clone, Default)]
pub struct CorpusLoad {
    pub documents: Vec<Document>,
    pub failures: Vec<DocFailure>,
    pub unknown_senses: Vec<UnknownSense>,
}

impl CorpusLoad {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }
}

fn read(path: &Path) -> Result<Vec<u8>, IngestError> {
    std::fs::read(path).map_err(|e| IngestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn read_text(path: &Path) -> Result<String, IngestError> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes).map_err(|e| IngestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(text.replace("\r\n", "\n"))
}

fn load_rst(path: &Path, text: &str, doc_id: &str) -> Result<RstTree, IngestError> {
    let bytes = read(path)?;
    if path.extension().is_some_and(|e| e == "dis") {
        return parse_rst_dis(&bytes, text);
    }
    let (found, tree) = parse_rst_json_in(&bytes, text)?;
    if found != doc_id {
        return Err(IngestError::DocIdMismatch {
            path: path.display().to_string(),
            expected: doc_id.to_string(),
            found,
        });
    }
    Ok(tree)
}

/// Loads one document: text, RST tree (`.dis` or JSON by extension) and PDTB relations.
pub fn load_document(entry: &ManifestEntry, taxonomy: &TaxonomyTable) -> Result<Document, IngestError> {
    let text = read_text(&entry.text)?;
    let rst = load_rst(&entry.rst, &text, &entry.doc_id)?;
    let entries = parse_pdtb_jsonl_with(&read(&entry.pdtb)?, taxonomy)?;
    let mut relations = Vec::with_capacity(entries.len());
    for e in entries {
        if e.doc_id != entry.doc_id {
            return Err(IngestError::DocIdMismatch {
                path: entry.pdtb.display().to_string(),
                expected: entry.doc_id.clone(),
                found: e.doc_id,
            });
        }
        relations.push(e.relation);
    }
    Ok(Document::new(entry.doc_id.clone(), text, rst, relations)?)
}

/// Loads every manifest entry in parallel; results keep manifest order and
/// failures are collected per document.
pub fn load_corpus(manifest: &CorpusManifest, taxonomy: &TaxonomyTable) -> CorpusLoad {
    let results: Vec<Result<Document, IngestError>> = manifest.entries.par_iter().map(|e| load_document(e, taxonomy)).collect();
    let mut load = CorpusLoad::default();
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok(doc) => {
                for rel in &doc.pdtb {
                    for sense in rel.senses.iter().filter(|s| !taxonomy.is_known(s)) {
                        load.unknown_senses.push(UnknownSense {
                            doc_id: doc.doc_id.clone(),
                            rel_id: rel.rel_id.clone(),
                            sense: sense.to_string(),
                        });
                    }
                }
                load.documents.push(doc);
            }
            Err(error) => load.failures.push(DocFailure {
                doc_id: entry.doc_id.clone(),
                error,
            }),
        }
    }
    load
}
