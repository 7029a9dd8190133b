//! Five-fold cross-validation on a generated corpus.
//!
//! ```text
//! cargo run --release --example crossval_synthetic
//! ```

use sdprelex::harness::{crossval, generate_synthetic_corpus, FoldPlan, SynthSpec};
use sdprelex::parser::{train_parser, ParserHyper};
use sdprelex::relex::RelexHyper;

fn main() -> sdprelex::Result<()> {
    env_logger::init();
    let corpus = generate_synthetic_corpus(&SynthSpec::default())?;
    let parser = train_parser(&corpus.treebank, &ParserHyper::default())?.model;

    let ids: Vec<&str> = corpus.documents.iter().map(|d| d.doc_id.as_str()).collect();
    let plan = FoldPlan::new(&ids, 5, 7)?;
    let hyper = RelexHyper {
        hidden: 64,
        dense: 64,
        epochs: 50,
        ..RelexHyper::default()
    };
    let report = crossval(&corpus.documents, &corpus.treebank, &plan, &parser, &hyper, None)?;
    for f in &report.folds {
        println!(
            "fold {}: {} test instances, micro F1 {:.2}",
            f.fold + 1,
            f.test_instances,
            f.metrics.micro.f1
        );
    }
    println!("average micro F1 {:.2}", report.average_micro_f1);
    println!(
        "average micro F1 without NONE {:.2}",
        report.average_micro_f1_excluding_none
    );
    Ok(())
}
