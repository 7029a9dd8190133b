//! Trains the transition parser on generated trees and reports attachment
//! scores on held-out sentences.
//!
//! ```text
//! cargo run --release --example train_parser
//! ```

use sdprelex::harness::{generate_synthetic_corpus, SynthSpec};
use sdprelex::parser::{evaluate_uas_las, train_parser, transition_accuracy, ParserHyper};
use sdprelex::treebank::Treebank;

fn main() -> sdprelex::Result<()> {
    env_logger::init();
    let corpus = generate_synthetic_corpus(&SynthSpec {
        documents: 10,
        sentences_per_document: 10,
        seed: 3,
    })?;
    let (train, test) = corpus.treebank.sentences.split_at(50);
    let train = Treebank::new(train.to_vec());
    let test = Treebank::new(test.to_vec());

    let trained = train_parser(&train, &ParserHyper::default())?;
    for e in trained.log.iter().step_by(5) {
        println!("epoch {:>2}  loss {:.4}  accuracy {:.4}", e.epoch, e.loss, e.accuracy);
    }
    let model = trained.model;
    println!("training transition accuracy {:.4}", transition_accuracy(&model, &train)?);

    let parsed = model.parse_treebank(&test);
    let scores = evaluate_uas_las(&test, &parsed)?;
    println!(
        "held-out UAS {:.2}  LAS {:.2}  ({} tokens)",
        scores.uas, scores.las, scores.tokens
    );
    Ok(())
}
