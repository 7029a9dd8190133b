//! Trains the LSTM relation classifier on path instances whose label is
//! fixed by a marker word, optionally starting from word2vec vectors.
//!
//! ```text
//! cargo run --release --example train_relex
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdprelex::concept::{BioTag, ConceptType, RelationLabel};
use sdprelex::relex::{accuracy, load_word_vectors, train_relex, RelexHyper, VectorFormat, WordVectors};
use sdprelex::sdp::SdpInstance;

const MARKERS: [(&str, RelationLabel); 4] = [
    ("improved", RelationLabel::TrIP),
    ("worsened", RelationLabel::TrWP),
    ("treated", RelationLabel::TrAP),
    ("noted", RelationLabel::None),
];

fn instance(rng: &mut ChaCha8Rng) -> SdpInstance {
    let (verb, label) = MARKERS[rng.gen_range(0..MARKERS.len())];
    let drug = ["aspirin", "insulin", "lasix"][rng.gen_range(0..3)];
    let problem = ["fever", "pain", "edema"][rng.gen_range(0..3)];
    SdpInstance {
        words: vec![drug.into(), verb.into(), problem.into()],
        concepts: vec![
            BioTag::Begin(ConceptType::Treatment),
            BioTag::Outside,
            BioTag::Begin(ConceptType::Problem),
        ],
        deprels: vec!["nsubj".into(), "nsubj".into(), "obj".into()],
        pos: vec!["NN".into(), "VBD".into(), "NN".into()],
        label,
    }
}

fn main() -> sdprelex::Result<()> {
    env_logger::init();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data: Vec<SdpInstance> = (0..40).map(|_| instance(&mut rng)).collect();

    // A tiny text-format embedding file, as word2vec would write it.
    let text = "3 4\nfever 0.1 0.2 0.3 0.4\npain -0.1 0.0 0.2 0.1\naspirin 0.5 -0.5 0.0 0.3\n";
    let vectors: WordVectors = load_word_vectors(text.as_bytes(), VectorFormat::Text)?;

    let hyper = RelexHyper {
        hidden: 32,
        dense: 32,
        epochs: 60,
        stop_at_accuracy: Some(1.0),
        ..RelexHyper::default()
    };
    let trained = train_relex(&data, &hyper, Some(&vectors))?;
    for e in trained.log.iter().step_by(5) {
        println!("epoch {:>3}  loss {:.4}  accuracy {:.3}", e.epoch, e.loss, e.accuracy);
    }
    let model = trained.model;
    println!("word dimension {}", model.embeddings.word_dim());
    println!("final training accuracy {:.3}", accuracy(&model, &data)?);
    println!("prediction for the first instance: {}", model.predict(&data[0])?);
    Ok(())
}
