//! Shortest dependency path between two concepts, and the four aligned
//! sequences the classifier reads.
//!
//! ```text
//! cargo run --example shortest_path
//! ```

use sdprelex::concept::{ConceptSpan, ConceptType, RelationLabel};
use sdprelex::sdp::{build_undirected_graph, make_instance, shortest_path};
use sdprelex::treebank::DepSentence;

fn main() -> sdprelex::Result<()> {
    let s = DepSentence::from_columns(
        &["A", "biopsy", "of", "this", "mass", "was", "consistent", "with", "hematoma", "."],
        &["DT", "NN", "IN", "DT", "NN", "VBD", "JJ", "IN", "NN", "."],
        &[2, 7, 2, 5, 3, 7, 0, 7, 8, 7],
        &["det", "nsubj", "prep", "det", "pobj", "cop", "root", "prep", "pobj", "punct"],
    );
    let biopsy = ConceptSpan::new(1, 0, 1, ConceptType::Test, "a biopsy");
    let mass = ConceptSpan::new(1, 3, 4, ConceptType::Problem, "this mass");
    let hematoma = ConceptSpan::new(1, 8, 8, ConceptType::Problem, "hematoma");

    let g = build_undirected_graph(&s)?;
    for (c1, c2, label) in [
        (&biopsy, &mass, RelationLabel::TeCP),
        (&biopsy, &hematoma, RelationLabel::TeCP),
        (&mass, &hematoma, RelationLabel::PIP),
    ] {
        let path = shortest_path(&g, c1, c2, &s)?;
        let inst = make_instance(&path, &s, c1, c2, label)?;
        println!("{} -> {}  path {:?}", c1.text, c2.text, path);
        println!("  {}", inst);
    }
    Ok(())
}
