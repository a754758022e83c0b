use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{ArgGroup, Args, Parser, Subcommand};

use discalign::alignment::{align_corpus, parse_aligned_jsonl, AlignConfig, AlignmentRecord};
use discalign::ingestion::{load_corpus, CorpusManifest};
use discalign::mapping::CorrespondenceGrid;
use discalign::report::{mapping_report, query, render_json, render_markdown, yield_summary, Query, RenderOptions};
use discalign::stats::{build_table, connective_tests, ConnectiveOptions, FisherOptions, Split, DEFAULT_SEED};
use discalign::taxonomy::TaxonomyTable;

#[derive(Parser)]
#[command(
    name = "discalign",
    version,
    about = "Align PDTB relations with RST trees and compare their labels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align every relation of a corpus manifest and write JSON lines.
    Align {
        manifest: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Keep flagged alignments in the analysis.
        #[arg(long)]
        include_flagged: bool,
        /// Match arguments with their connective tokens included.
        #[arg(long)]
        no_strip_connective: bool,
        /// Leave whitespace out of overlap and margin counts.
        #[arg(long)]
        ignore_whitespace: bool,
    },
    /// Cross-tabulate PDTB senses against RST labels as TSV.
    Tables {
        aligned: PathBuf,
        #[command(flatten)]
        table: TableArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare observed label pairs with the mapping proposals.
    CompareMappings {
        aligned: PathBuf,
        /// Correspondence grid JSON; the bundled grid by default.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[command(flatten)]
        table: TableArgs,
        /// Markdown unless the output ends in .json.
        #[arg(long, value_parser = ["md", "json"])]
        format: Option<String>,
        /// Merge rows and columns below this size into "other" (markdown only).
        #[arg(long)]
        other_threshold: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Test sense and label independence per connective.
    TestConnectives {
        aligned: PathBuf,
        #[arg(long, default_value_t = 10)]
        min_n: usize,
        /// Monte Carlo seed in hex.
        #[arg(long, value_parser = parse_hex, default_value = "5EED")]
        seed: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
        level: u8,
        /// Count implicit relations under their inserted connective too.
        #[arg(long)]
        include_implicit: bool,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the aligned records matching one filter.
    #[command(group(ArgGroup::new("filter").required(true).args(["rst", "pdtb", "flag"])))]
    Query {
        aligned: PathBuf,
        #[arg(long)]
        rst: Option<String>,
        /// Matches the sense and its subtypes.
        #[arg(long)]
        pdtb: Option<String>,
        #[arg(long)]
        flag: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value = "all")]
    split: Split,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
    level: u8,
}

fn parse_hex(s: &str) -> Result<u64, String> {
    let digits = s.trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(digits, 16).map_err(|e| format!("not a hex seed: {e}"))
}

enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

fn write_output(path: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn read_records(path: &Path) -> anyhow::Result<Vec<AlignmentRecord>> {
    let src = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_aligned_jsonl(&src).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_grid(path: Option<&Path>) -> anyhow::Result<CorrespondenceGrid> {
    match path {
        None => Ok(CorrespondenceGrid::bundled().clone()),
        Some(p) => {
            let bytes = fs::read(p).with_context(|| format!("cannot read {}", p.display()))?;
            CorrespondenceGrid::from_json(&bytes, TaxonomyTable::bundled()).map_err(|e| anyhow!("{}: {e}", p.display()))
        }
    }
}

fn jsonl(records: &[&AlignmentRecord]) -> String {
    records.iter().map(|r| r.to_json_line() + "\n").collect()
}

/// Returns true when some documents failed to load.
fn align(manifest: &Path, output: Option<&Path>, config: &AlignConfig) -> Result<bool, Failure> {
    let manifest = CorpusManifest::load(manifest).map_err(|e| anyhow!("{}: {e}", manifest.display()))?;
    let load = load_corpus(&manifest, TaxonomyTable::bundled());
    for f in &load.failures {
        eprintln!("error: {}: {}", f.doc_id, f.error);
    }
    for u in &load.unknown_senses {
        eprintln!("warning: {} {}: unknown sense {:?}", u.doc_id, u.rel_id, u.sense);
    }
    if load.documents.is_empty() && !manifest.entries.is_empty() {
        return Err(Failure::Data(anyhow!("no document could be loaded")));
    }
    let records = align_corpus(&load.documents, config);
    let refs: Vec<&AlignmentRecord> = records.iter().collect();
    write_output(output, &jsonl(&refs))?;
    let y = yield_summary(&records);
    eprintln!(
        "{} relations from {} documents: {} mapped, {} flagged, {} unalignable",
        y.total,
        load.documents.len(),
        y.mapped,
        y.flagged,
        y.unalignable
    );
    Ok(load.is_partial())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Align {
            manifest,
            output,
            include_flagged,
            no_strip_connective,
            ignore_whitespace,
        } => {
            let config = AlignConfig {
                strip_connective: !no_strip_connective,
                include_flagged,
                ignore_whitespace,
                ..AlignConfig::default()
            };
            align(&manifest, output.as_deref(), &config)
        }
        Command::Tables { aligned, table, output } => {
            let records = read_records(&aligned)?;
            let t = build_table(&records, table.level as usize, table.split, CorrespondenceGrid::bundled());
            write_output(output.as_deref(), &t.to_tsv())?;
            Ok(false)
        }
        Command::CompareMappings {
            aligned,
            grid,
            table,
            format,
            other_threshold,
            output,
        } => {
            let records = read_records(&aligned)?;
            let grid = load_grid(grid.as_deref())?;
            let report = mapping_report(&records, table.split, table.level as usize, &grid);
            let json = match format.as_deref() {
                Some(f) => f == "json",
                None => output.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "json")),
            };
            let text = if json {
                render_json(&report)
            } else {
                let mut opts = RenderOptions::for_split(table.split);
                if let Some(t) = other_threshold {
                    opts.other_threshold = t;
                }
                render_markdown(&report, &opts) + "\n"
            };
            write_output(output.as_deref(), &text)?;
            Ok(false)
        }
        Command::TestConnectives {
            aligned,
            min_n,
            seed,
            level,
            include_implicit,
            samples,
            output,
        } => {
            let records = read_records(&aligned)?;
            let opts = ConnectiveOptions {
                min_n,
                level: level as usize,
                include_implicit,
                fisher: FisherOptions {
                    seed,
                    samples,
                    ..FisherOptions::default()
                },
                ..ConnectiveOptions::default()
            };
            let results = connective_tests(&records, CorrespondenceGrid::bundled(), &opts);
            let doc = serde_json::json!({
                "seed": format!("{seed:#X}"),
                "default_seed": seed == DEFAULT_SEED,
                "min_n": min_n,
                "level": level,
                "results": results,
            });
            write_output(
                output.as_deref(),
                &(serde_json::to_string_pretty(&doc).context("serializing results")? + "\n"),
            )?;
            Ok(false)
        }
        Command::Query {
            aligned,
            rst,
            pdtb,
            flag,
            output,
        } => {
            let q = match (rst, pdtb, flag) {
                (Some(l), _, _) => Query::rst(&l),
                (_, Some(s), _) => Query::pdtb(&s),
                (_, _, Some(f)) => Query::flag(&f),
                _ => unreachable!("clap requires one filter"),
            }
            .map_err(|e| Failure::Usage(anyhow!(e)))?;
            let records = read_records(&aligned)?;
            let hits = query(&records, &q);
            write_output(output.as_deref(), &jsonl(&hits))?;
            eprintln!("{} of {} records match", hits.len(), records.len());
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_PARTIAL),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DATA)
        }
    }
}
