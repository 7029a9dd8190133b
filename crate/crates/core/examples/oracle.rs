//! Derives the arc-standard transition sequence for a gold tree and replays it.
//!
//! ```text
//! cargo run --example oracle
//! ```

use sdprelex::transition::{format_sequence, oracle_sequence, Configuration};
use sdprelex::treebank::DepSentence;

fn main() -> sdprelex::Result<()> {
    let s = DepSentence::from_columns(
        &["A", "biopsy", "of", "this", "mass", "was", "consistent", "with", "hematoma", "."],
        &["DT", "NN", "IN", "DT", "NN", "VBD", "JJ", "IN", "NN", "."],
        &[2, 7, 2, 5, 3, 7, 0, 7, 8, 7],
        &["det", "nsubj", "prep", "det", "pobj", "cop", "root", "prep", "pobj", "punct"],
    );
    let seq = oracle_sequence(&s)?;
    println!("{}", format_sequence(&seq));

    let mut config = Configuration::initial(&s)?;
    for t in &seq {
        config.apply_mut(t)?;
        println!(
            "{:<18} stack {:?}  buffer {:?}",
            t.to_string(),
            config.stack(),
            config.buffer()
        );
    }
    assert_eq!(config.to_sentence(&s), s);
    println!("{} transitions for {} tokens", seq.len(), s.len());
    Ok(())
}
