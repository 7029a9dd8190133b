//! Parses i2b2 concept and relation lines and enumerates candidate pairs.
//!
//! ```text
//! cargo run --example i2b2_candidates [corpus_dir]
//! ```

use std::io::stdout;
use std::path::Path;

use sdprelex::corpus::{generate_candidates, load_corpus, write_candidates, Candidate, Document};

const TEXT: &str = "He did have burst of atrial fibrillation and was started on a Amiodarone gtt .\n";
const CON: &str = "\
c=\"burst of atrial fibrillation\" 1:3 1:6||t=\"problem\"
c=\"a amiodarone gtt\" 1:11 1:13||t=\"treatment\"
";
const REL: &str =
    "c=\"a amiodarone gtt\" 1:11 1:13||r=\"TrAP\"||c=\"burst of atrial fibrillation\" 1:3 1:6\n";

fn main() -> sdprelex::Result<()> {
    let docs = match std::env::args().nth(1) {
        Some(dir) => load_corpus(Path::new(&dir))?,
        None => vec![Document::from_strs("sample", TEXT, CON, REL)?],
    };
    let mut all = Vec::new();
    for d in &docs {
        let c = generate_candidates(d);
        eprintln!(
            "{}: {} concepts, {} relations, {} candidates ({} labelled, {} inadmissible pairs)",
            d.doc_id,
            d.concepts.len(),
            d.relations.len(),
            c.records.len(),
            c.labelled(),
            c.inadmissible
        );
        all.extend(c.records.iter().map(Candidate::from_record));
    }
    write_candidates(&all, stdout().lock())
}
