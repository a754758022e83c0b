//! Writes the synthetic corpus: `gen_corpus <dir> [seed] [docs]`.

use std::path::PathBuf;

use discalign::synth::{generate_corpus, write_corpus};

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "data/synthetic".into()));
    let seed = args.next().map_or(12, |s| s.parse().expect("numeric seed"));
    let n = args.next().map_or(20, |s| s.parse().expect("numeric document count"));
    let docs = generate_corpus(seed, n);
    std::fs::create_dir_all(&dir)?;
    write_corpus(&dir, &docs)?;
    let relations: usize = docs.iter().map(|d| d.relations.len()).sum();
    println!("{} documents, {relations} relations in {}", docs.len(), dir.display());
    Ok(())
}
