//! Reads a CoNLL-U treebank, validates every tree, and writes it back.
//!
//! ```text
//! cargo run --example conllu_roundtrip [file.conllu]
//! ```

use std::fs::File;
use std::io::BufReader;

use sdprelex::treebank::{read_conllu, read_conllu_str, write_conllu_string};

const SAMPLE: &str = "\
# sent_id = 1
1\tHe\t_\tPRP\t_\t_\t2\tnsubj\t_\t_
2\tsleeps\t_\tVBZ\t_\t_\t0\troot\t_\t_
3\t.\t_\t.\t_\t_\t2\tpunct\t_\t_

# sent_id = 2
1\tA\t_\tDT\t_\t_\t3\tdet\t_\t_
2\thearing\t_\tNN\t_\t_\t3\tnsubj\t_\t_
3\tis\t_\tVBZ\t_\t_\t0\troot\t_\t_
4\tscheduled\t_\tVBN\t_\t_\t3\txcomp\t_\t_
5\ttoday\t_\tNN\t_\t_\t2\tnmod\t_\t_
";

fn main() -> sdprelex::Result<()> {
    let tb = match std::env::args().nth(1) {
        Some(path) => read_conllu(BufReader::new(File::open(path)?))?,
        None => read_conllu_str(SAMPLE)?,
    };
    for (i, s) in tb.sentences.iter().enumerate() {
        s.validate(&s.describe(i + 1))?;
        println!(
            "{:<4} {:>2} tokens  projective: {}",
            s.sent_id().unwrap_or("-"),
            s.len(),
            s.is_projective()
        );
    }
    print!("{}", write_conllu_string(&tb)?);
    Ok(())
}
