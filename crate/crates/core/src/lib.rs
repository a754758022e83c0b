//! Alignment of PDTB relations with RST trees, sense correspondence grids
//! and the statistics built on them.

#[cfg(test)]
extern crate self as discalign;

pub mod alignment;
pub mod datafile;
pub mod ingestion;
pub mod mapping;
pub mod model;
pub mod report;
pub mod scenarios;
pub mod stats;
pub mod synth;
pub mod taxonomy;
