//! Greedy neural transition parser.
//!
//! Each configuration is described by 12 word slots and the 12 matching POS
//! slots, in this fixed order:
//!
//! | slots | content                                         |
//! |-------|-------------------------------------------------|
//! | 0–3   | stack items, top first                          |
//! | 4–7   | buffer items, front first                       |
//! | 8, 9  | leftmost / rightmost modifier of the stack top  |
//! | 10, 11| leftmost / rightmost modifier of the second item|
//!
//! Missing positions get the NULL id, the artificial root gets the ROOT id.
//! Embeddings of the 24 slots are concatenated and fed to one ReLU hidden
//! layer and a softmax over the transitions seen in training.

use std::io::{Read, Write};

use log::info;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{self, Matrix};
use crate::persist::{ModelReader, ModelWriter};
use crate::transition::{oracle_sequence, Configuration, Transition, TransitionKind};
use crate::treebank::{DepSentence, Treebank};
use crate::vocab::Vocab;

pub const NULL: usize = 0;
pub const UNK: usize = 1;
pub const ROOT: usize = 2;
const RESERVED: [&str; 3] = ["<null>", "<unk>", "<root>"];

pub const SLOTS: usize = 12;

const MAGIC: &str = "SDPRELEX-PARSER";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FeatureVector {
    pub words: [usize; SLOTS],
    pub tags: [usize; SLOTS],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParserHyper {
    pub embed_dim: usize,
    pub hidden: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Probability of replacing a singleton word by UNK during training.
    pub unk_rate: f64,
    pub init_scale: f64,
    pub seed: u64,
    /// How per-example losses combine into the batch loss.
    #[serde(default)]
    pub reduction: LossReduction,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossReduction {
    #[default]
    Sum,
    Mean,
}

impl Default for ParserHyper {
    fn default() -> Self {
        ParserHyper {
            embed_dim: 50,
            hidden: 200,
            learning_rate: 0.01,
            batch_size: 64,
            epochs: 30,
            unk_rate: 0.1,
            init_scale: 0.1,
            seed: 1,
            reduction: LossReduction::Sum,
        }
    }
}

/// Embedding tables plus the two affine layers.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedForward {
    pub word_embedding: Matrix,
    pub pos_embedding: Matrix,
    pub hidden_weights: Matrix,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Matrix,
    pub output_bias: Vec<f64>,
}

/// Gradients, shaped like [`FeedForward`].
#[derive(Clone, Debug)]
pub struct FeedForwardGrads {
    pub word_embedding: Matrix,
    pub pos_embedding: Matrix,
    pub hidden_weights: Matrix,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Matrix,
    pub output_bias: Vec<f64>,
}

struct Activations {
    input: Vec<f64>,
    pre: Vec<f64>,
    hidden: Vec<f64>,
    probs: Vec<f64>,
}

impl FeedForward {
    pub fn new<R: Rng>(
        words: usize,
        tags: usize,
        outputs: usize,
        embed_dim: usize,
        hidden: usize,
        scale: f64,
        rng: &mut R,
    ) -> Self {
        let input = 2 * SLOTS * embed_dim;
        let glorot = |fan_in: usize, fan_out: usize| (6.0 / (fan_in + fan_out) as f64).sqrt();
        FeedForward {
            word_embedding: Matrix::uniform(words, embed_dim, scale, rng),
            pos_embedding: Matrix::uniform(tags, embed_dim, scale, rng),
            hidden_weights: Matrix::uniform(hidden, input, glorot(input, hidden), rng),
            hidden_bias: vec![0.0; hidden],
            output_weights: Matrix::uniform(outputs, hidden, glorot(hidden, outputs), rng),
            output_bias: vec![0.0; outputs],
        }
    }

    pub fn embed_dim(&self) -> usize {
        self.word_embedding.cols
    }

    pub fn outputs(&self) -> usize {
        self.output_bias.len()
    }

    fn input(&self, f: &FeatureVector) -> Vec<f64> {
        let d = self.embed_dim();
        let mut x = Vec::with_capacity(2 * SLOTS * d);
        for &w in &f.words {
            x.extend_from_slice(self.word_embedding.row(w));
        }
        for &t in &f.tags {
            x.extend_from_slice(self.pos_embedding.row(t));
        }
        x
    }

    fn activate(&self, f: &FeatureVector) -> Activations {
        let input = self.input(f);
        let pre = self.hidden_weights.affine(&input, &self.hidden_bias);
        let hidden: Vec<f64> = pre.iter().map(|&z| z.max(0.0)).collect();
        let logits = self.output_weights.affine(&hidden, &self.output_bias);
        Activations {
            input,
            pre,
            hidden,
            probs: nn::softmax(&logits),
        }
    }

    /// Transition scores (softmax probabilities).
    pub fn scores(&self, f: &FeatureVector) -> Vec<f64> {
        self.activate(f).probs
    }

    pub fn zero_grads(&self) -> FeedForwardGrads {
        FeedForwardGrads {
            word_embedding: Matrix::zeros(self.word_embedding.rows, self.word_embedding.cols),
            pos_embedding: Matrix::zeros(self.pos_embedding.rows, self.pos_embedding.cols),
            hidden_weights: Matrix::zeros(self.hidden_weights.rows, self.hidden_weights.cols),
            hidden_bias: vec![0.0; self.hidden_bias.len()],
            output_weights: Matrix::zeros(self.output_weights.rows, self.output_weights.cols),
            output_bias: vec![0.0; self.output_bias.len()],
        }
    }

    /// Summed cross-entropy over `batch`, accumulating its gradient into `grads`.
    pub fn loss_and_grad(
        &self,
        batch: &[(FeatureVector, usize)],
        grads: &mut FeedForwardGrads,
    ) -> f64 {
        let d = self.embed_dim();
        let mut loss = 0.0;
        for (f, gold) in batch {
            let act = self.activate(f);
            loss += nn::cross_entropy(&act.probs, *gold);

            let mut dlogits = act.probs.clone();
            dlogits[*gold] -= 1.0;

            grads.output_weights.add_outer(&dlogits, &act.hidden);
            nn::axpy(1.0, &dlogits, &mut grads.output_bias);

            let mut dpre = vec![0.0; act.hidden.len()];
            self.output_weights.matvec_t_acc(&dlogits, &mut dpre);
            for (g, &z) in dpre.iter_mut().zip(&act.pre) {
                if z <= 0.0 {
                    *g = 0.0;
                }
            }
            grads.hidden_weights.add_outer(&dpre, &act.input);
            nn::axpy(1.0, &dpre, &mut grads.hidden_bias);

            let mut dinput = vec![0.0; act.input.len()];
            self.hidden_weights.matvec_t_acc(&dpre, &mut dinput);
            for (slot, &w) in f.words.iter().enumerate() {
                nn::axpy(1.0, &dinput[slot * d..(slot + 1) * d], grads.word_embedding.row_mut(w));
            }
            for (slot, &t) in f.tags.iter().enumerate() {
                let off = (SLOTS + slot) * d;
                nn::axpy(1.0, &dinput[off..off + d], grads.pos_embedding.row_mut(t));
            }
        }
        loss
    }

    /// Parameter tensors in a fixed order, for updates and gradient checks.
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            &mut self.word_embedding.data,
            &mut self.pos_embedding.data,
            &mut self.hidden_weights.data,
            &mut self.hidden_bias,
            &mut self.output_weights.data,
            &mut self.output_bias,
        ]
    }

    fn is_finite(&self) -> bool {
        self.word_embedding.is_finite()
            && self.pos_embedding.is_finite()
            && self.hidden_weights.is_finite()
            && self.output_weights.is_finite()
            && self.hidden_bias.iter().chain(&self.output_bias).all(|x| x.is_finite())
    }
}

impl FeedForwardGrads {
    /// Same order as [`FeedForward::tensors_mut`].
    pub fn tensors(&self) -> Vec<&[f64]> {
        vec![
            &self.word_embedding.data,
            &self.pos_embedding.data,
            &self.hidden_weights.data,
            &self.hidden_bias,
            &self.output_weights.data,
            &self.output_bias,
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParserModel {
    pub words: Vocab,
    pub tags: Vocab,
    pub transitions: Vec<Transition>,
    pub net: FeedForward,
    pub hyper: ParserHyper,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParserEpoch {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug)]
pub struct TrainedParser {
    pub model: ParserModel,
    pub log: Vec<ParserEpoch>,
    /// Sentences dropped because they are not projective.
    pub excluded: usize,
}

/// Splits off non-projective sentences. Returns the kept treebank and the
/// number of excluded sentences.
pub fn filter_projective(tb: &Treebank) -> (Treebank, usize) {
    let kept: Vec<DepSentence> = tb
        .sentences
        .iter()
        .filter(|s| s.is_projective())
        .cloned()
        .collect();
    let excluded = tb.len() - kept.len();
    (
        Treebank {
            sentences: kept,
            source: tb.source.clone(),
        },
        excluded,
    )
}

pub fn word_key(form: &str) -> String {
    form.to_lowercase()
}

impl ParserModel {
    pub fn features(&self, config: &Configuration, sentence: &DepSentence) -> FeatureVector {
        extract_features(config, sentence, &self.words, &self.tags)
    }

    /// Greedy decoding with legality masking. Heads and labels of the input
    /// are ignored. Always takes exactly `2n` transitions.
    pub fn parse(&self, sentence: &DepSentence) -> DepSentence {
        if sentence.is_empty() {
            return sentence.clone();
        }
        let mut config = Configuration::initial(sentence).expect("non-empty");
        while !config.is_terminal() {
            let t = self.predict(&config, sentence);
            config.apply_mut(&t).expect("masked to legal transitions");
        }
        config.to_sentence(sentence)
    }

    pub fn parse_treebank(&self, tb: &Treebank) -> Treebank {
        Treebank {
            sentences: tb.sentences.iter().map(|s| self.parse(s)).collect(),
            source: tb.source.clone(),
        }
    }

    /// Highest-scoring legal transition.
    pub fn predict(&self, config: &Configuration, sentence: &DepSentence) -> Transition {
        let legal = config.legal();
        let scores = self.net.scores(&self.features(config, sentence));
        let best = self
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, t)| legal.allows(t.kind()))
            .max_by(|a, b| scores[a.0].total_cmp(&scores[b.0]).then(b.0.cmp(&a.0)));
        match best {
            Some((_, t)) => t.clone(),
            // only reachable if training never produced a transition of a legal kind
            None => match legal.kinds()[0] {
                TransitionKind::Shift => Transition::Shift,
                TransitionKind::LeftArc => Transition::LeftArc("dep".into()),
                TransitionKind::RightArc => Transition::RightArc("dep".into()),
            },
        }
    }

    pub fn save<W: Write>(&self, out: W) -> Result<()> {
        let mut w = ModelWriter::new(out, MAGIC, VERSION)?;
        w.str(&serde_json::to_string(&self.hyper).expect("hyperparameters serialize"))?;
        w.strings(self.words.items())?;
        w.strings(self.tags.items())?;
        let transitions: Vec<String> = self.transitions.iter().map(|t| t.to_string()).collect();
        w.strings(&transitions)?;
        w.matrix(&self.net.word_embedding)?;
        w.matrix(&self.net.pos_embedding)?;
        w.matrix(&self.net.hidden_weights)?;
        w.floats(&self.net.hidden_bias)?;
        w.matrix(&self.net.output_weights)?;
        w.floats(&self.net.output_bias)?;
        w.finish()?;
        Ok(())
    }

    pub fn load<R: Read>(input: R) -> Result<Self> {
        let mut r = ModelReader::new(input, MAGIC, VERSION)?;
        let hyper: ParserHyper = serde_json::from_str(&r.str()?)
            .map_err(|e| Error::Format(format!("bad header: {}", e)))?;
        let words = Vocab::from_items(r.strings()?);
        let tags = Vocab::from_items(r.strings()?);
        let transitions = r
            .strings()?
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Transition>>>()?;
        let d = hyper.embed_dim;
        let h = hyper.hidden;
        let word_embedding = r.matrix_shaped(words.len(), d, "word embedding")?;
        let pos_embedding = r.matrix_shaped(tags.len(), d, "POS embedding")?;
        let hidden_weights = r.matrix_shaped(h, 2 * SLOTS * d, "hidden weights")?;
        let hidden_bias = r.floats_len(h, "hidden bias")?;
        let output_weights = r.matrix_shaped(transitions.len(), h, "output weights")?;
        let output_bias = r.floats_len(transitions.len(), "output bias")?;
        Ok(ParserModel {
            words,
            tags,
            transitions,
            net: FeedForward {
                word_embedding,
                pos_embedding,
                hidden_weights,
                hidden_bias,
                output_weights,
                output_bias,
            },
            hyper,
        })
    }
}

/// Feature template over a configuration; see the module docs for the layout.
pub fn extract_features(
    config: &Configuration,
    sentence: &DepSentence,
    words: &Vocab,
    tags: &Vocab,
) -> FeatureVector {
    let mut slots = [None; SLOTS];
    for i in 0..4 {
        slots[i] = config.stack_item(i);
        slots[4 + i] = config.buffer_item(i);
    }
    for (k, item) in [config.stack_item(0), config.stack_item(1)].iter().enumerate() {
        if let Some(&h) = item.as_ref().filter(|&&h| h != 0) {
            slots[8 + 2 * k] = config.leftmost_modifier(h);
            slots[9 + 2 * k] = config.rightmost_modifier(h);
        }
    }

    let mut f = FeatureVector {
        words: [NULL; SLOTS],
        tags: [NULL; SLOTS],
    };
    for (k, slot) in slots.iter().enumerate() {
        match *slot {
            None => {}
            Some(0) => {
                f.words[k] = ROOT;
                f.tags[k] = ROOT;
            }
            Some(i) => {
                let tok = sentence.token(i);
                f.words[k] = words.id_or(&word_key(&tok.form), UNK);
                f.tags[k] = tags.id_or(&tok.pos, UNK);
            }
        }
    }
    f
}

/// Training examples: every oracle configuration paired with its transition.
fn unroll(
    tb: &Treebank,
    words: &Vocab,
    tags: &Vocab,
    transitions: &mut Vec<Transition>,
) -> Result<Vec<(FeatureVector, usize)>> {
    let mut examples = Vec::new();
    for sentence in &tb.sentences {
        let seq = oracle_sequence(sentence)?;
        let mut config = Configuration::initial(sentence)?;
        for t in seq {
            let id = match transitions.iter().position(|x| *x == t) {
                Some(id) => id,
                None => {
                    transitions.push(t.clone());
                    transitions.len() - 1
                }
            };
            examples.push((extract_features(&config, sentence, words, tags), id));
            config.apply_mut(&t)?;
        }
    }
    Ok(examples)
}

fn accuracy(net: &FeedForward, examples: &[(FeatureVector, usize)]) -> f64 {
    if examples.is_empty() {
        return 0.0;
    }
    let correct = examples
        .iter()
        .filter(|(f, gold)| nn::argmax(&net.scores(f)) == *gold)
        .count();
    correct as f64 / examples.len() as f64
}

/// Trains a parser from gold trees. Non-projective sentences are excluded
/// (and counted); an empty remainder is an error.
pub fn train_parser(tb: &Treebank, hyper: &ParserHyper) -> Result<TrainedParser> {
    let (tb, excluded) = filter_projective(tb);
    if excluded > 0 {
        info!("excluded {} non-projective sentences from parser training", excluded);
    }
    if tb.is_empty() {
        return Err(Error::invalid("no projective sentences to train the parser on"));
    }
    for (i, s) in tb.sentences.iter().enumerate() {
        s.validate(&s.describe(i + 1))?;
    }

    let mut words = Vocab::with_reserved(&RESERVED);
    let mut tags = Vocab::with_reserved(&RESERVED);
    let mut counts: Vec<usize> = vec![0; RESERVED.len()];
    for s in &tb.sentences {
        for tok in &s.tokens {
            let id = words.insert(&word_key(&tok.form));
            if id == counts.len() {
                counts.push(0);
            }
            counts[id] += 1;
            tags.insert(&tok.pos);
        }
    }
    let singleton: Vec<bool> = counts.iter().enumerate().map(|(i, &c)| i >= RESERVED.len() && c == 1).collect();

    let mut transitions = Vec::new();
    let examples = unroll(&tb, &words, &tags, &mut transitions)?;

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut net = FeedForward::new(
        words.len(),
        tags.len(),
        transitions.len(),
        hyper.embed_dim,
        hyper.hidden,
        hyper.init_scale,
        &mut rng,
    );

    let mut log = Vec::with_capacity(hyper.epochs);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let batch_size = hyper.batch_size.max(1);
    for epoch in 1..=hyper.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for (b, chunk) in order.chunks(batch_size).enumerate() {
            let batch: Vec<(FeatureVector, usize)> = chunk
                .iter()
                .map(|&i| {
                    let (mut f, gold) = examples[i];
                    for w in f.words.iter_mut() {
                        if singleton[*w] && rng.gen_bool(hyper.unk_rate) {
                            *w = UNK;
                        }
                    }
                    (f, gold)
                })
                .collect();
            let mut grads = net.zero_grads();
            let loss = net.loss_and_grad(&batch, &mut grads);
            if !loss.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite parser loss at epoch {}, batch {}",
                    epoch,
                    b + 1
                )));
            }
            total += loss;
            let rate = match hyper.reduction {
                LossReduction::Sum => hyper.learning_rate,
                LossReduction::Mean => hyper.learning_rate / batch.len() as f64,
            };
            for (p, g) in net.tensors_mut().into_iter().zip(grads.tensors()) {
                nn::sgd_step(p, g, rate);
            }
        }
        if !net.is_finite() {
            return Err(Error::Numerical(format!("non-finite parser weights after epoch {}", epoch)));
        }
        let stats = ParserEpoch {
            epoch,
            loss: total / examples.len() as f64,
            accuracy: accuracy(&net, &examples),
        };
        info!("parser epoch {}: loss {:.4}, accuracy {:.4}", epoch, stats.loss, stats.accuracy);
        log.push(stats);
    }

    Ok(TrainedParser {
        model: ParserModel {
            words,
            tags,
            transitions,
            net,
            hyper: hyper.clone(),
        },
        log,
        excluded,
    })
}

/// Transition accuracy of `model` on the oracle configurations of `tb`.
pub fn transition_accuracy(model: &ParserModel, tb: &Treebank) -> Result<f64> {
    let (tb, _) = filter_projective(tb);
    let mut correct = 0;
    let mut total = 0;
    for sentence in &tb.sentences {
        let mut config = Configuration::initial(sentence)?;
        for t in oracle_sequence(sentence)? {
            let scores = model.net.scores(&model.features(&config, sentence));
            if model.transitions.get(nn::argmax(&scores)) == Some(&t) {
                correct += 1;
            }
            total += 1;
            config.apply_mut(&t)?;
        }
    }
    Ok(if total == 0 { 0.0 } else { correct as f64 / total as f64 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AttachmentScores {
    /// Percent of tokens with the correct head.
    pub uas: f64,
    /// Percent of tokens with the correct head and label.
    pub las: f64,
    pub tokens: usize,
}

/// Token-level (micro-averaged) attachment scores.
pub fn evaluate_uas_las(gold: &Treebank, pred: &Treebank) -> Result<AttachmentScores> {
    if gold.len() != pred.len() {
        return Err(Error::invalid(format!(
            "gold has {} sentences, prediction has {}",
            gold.len(),
            pred.len()
        )));
    }
    let mut heads = 0;
    let mut labeled = 0;
    let mut tokens = 0;
    for (i, (g, p)) in gold.sentences.iter().zip(&pred.sentences).enumerate() {
        if g.len() != p.len() {
            return Err(Error::structure(
                g.describe(i + 1),
                format!("gold has {} tokens, prediction has {}", g.len(), p.len()),
            ));
        }
        for (gt, pt) in g.tokens.iter().zip(&p.tokens) {
            tokens += 1;
            if gt.head == pt.head {
                heads += 1;
                if gt.deprel == pt.deprel {
                    labeled += 1;
                }
            }
        }
    }
    let pct = |c: usize| if tokens == 0 { 0.0 } else { 100.0 * c as f64 / tokens as f64 };
    Ok(AttachmentScores {
        uas: pct(heads),
        las: pct(labeled),
        tokens,
    })
}
