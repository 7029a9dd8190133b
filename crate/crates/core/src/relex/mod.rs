//! Relation classifier over shortest dependency paths.
//!
//! ```text
//! x_t = E_word(w_t) ⊕ E_concept(e_t) ⊕ E_deprel(d_t) ⊕ E_pos(p_t)
//! h_1..h_n = LSTM(x_1..x_n)
//! a = ReLU(W_d · dropout(h_n) + b_d)
//! p = softmax(W_o · a + b_o)          (9 classes)
//! ```
//!
//! Trained one instance at a time with cross-entropy and RMSProp. All four
//! embedding tables are updated, including pretrained word rows.

mod embeddings;
mod lstm;

use std::collections::BTreeMap;
use std::io::{Read, Write};

use log::info;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::concept::RelationLabel;
use crate::error::{Error, Result};
use crate::nn::{self, Matrix, RmsProp};
use crate::persist::{ModelReader, ModelWriter};
use crate::sdp::SdpInstance;
use crate::vocab::Vocab;

pub use embeddings::{
    concept_vocab, embed_input, load_word_vectors, EmbeddingTables, EncodedInstance, VectorFormat,
    WordVectors, UNK,
};
pub use lstm::{lstm_backward, lstm_forward, LstmParams, LstmStep, LstmTrace};

const MAGIC: &str = "SDPRELEX-RE";
const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelexHyper {
    pub hidden: usize,
    pub dense: usize,
    /// Dimension of the concept, label and tag embeddings, and of word
    /// embeddings when no pretrained vectors are given.
    pub embed_dim: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub decay: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub init_scale: f64,
    pub word_init_scale: f64,
    pub seed: u64,
    /// Stop once training accuracy reaches this value.
    #[serde(default)]
    pub stop_at_accuracy: Option<f64>,
}

impl Default for RelexHyper {
    fn default() -> Self {
        RelexHyper {
            hidden: 512,
            dense: 256,
            embed_dim: 50,
            dropout: 0.3,
            learning_rate: 0.001,
            decay: 0.9,
            epsilon: 1e-8,
            epochs: 50,
            init_scale: 0.08,
            word_init_scale: 0.05,
            seed: 1,
            stop_at_accuracy: None,
        }
    }
}

impl RelexHyper {
    pub fn optimizer(&self) -> RmsProp {
        RmsProp {
            learning_rate: self.learning_rate,
            decay: self.decay,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelexModel {
    pub embeddings: EmbeddingTables,
    pub lstm: LstmParams,
    pub dense_weights: Matrix,
    pub dense_bias: Vec<f64>,
    pub output_weights: Matrix,
    pub output_bias: Vec<f64>,
    pub hyper: RelexHyper,
}

/// Embedding gradients, keyed by row.
#[derive(Clone, Debug, Default)]
pub struct SparseRows {
    pub rows: BTreeMap<usize, Vec<f64>>,
}

impl SparseRows {
    fn add(&mut self, row: usize, grad: &[f64]) {
        let entry = self.rows.entry(row).or_insert_with(|| vec![0.0; grad.len()]);
        nn::axpy(1.0, grad, entry);
    }

    pub fn to_dense(&self, rows: usize, cols: usize) -> Vec<f64> {
        let mut out = vec![0.0; rows * cols];
        for (&r, g) in &self.rows {
            out[r * cols..(r + 1) * cols].copy_from_slice(g);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct RelexGrads {
    /// word, concept, deprel, pos
    pub embeddings: [SparseRows; 4],
    pub lstm: LstmParams,
    pub dense_weights: Matrix,
    pub dense_bias: Vec<f64>,
    pub output_weights: Matrix,
    pub output_bias: Vec<f64>,
}

/// Intermediate values of one forward pass.
#[derive(Clone, Debug)]
pub struct ForwardPass {
    pub encoded: EncodedInstance,
    pub trace: LstmTrace,
    /// Multiplier applied to `h_n` (inverted dropout); `None` at inference.
    pub mask: Option<Vec<f64>>,
    pub dense_input: Vec<f64>,
    pub dense_pre: Vec<f64>,
    pub dense_out: Vec<f64>,
    pub probs: Vec<f64>,
}

impl RelexModel {
    pub fn new<R: Rng>(embeddings: EmbeddingTables, hyper: &RelexHyper, rng: &mut R) -> Self {
        let input = embeddings.input_dim();
        let s = hyper.init_scale;
        RelexModel {
            lstm: LstmParams::uniform(hyper.hidden, input, s, rng),
            dense_weights: Matrix::uniform(hyper.dense, hyper.hidden, s, rng),
            dense_bias: vec![0.0; hyper.dense],
            output_weights: Matrix::uniform(RelationLabel::COUNT, hyper.dense, s, rng),
            output_bias: vec![0.0; RelationLabel::COUNT],
            embeddings,
            hyper: hyper.clone(),
        }
    }

    fn dropout_mask<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let rate = self.hyper.dropout;
        let keep = 1.0 / (1.0 - rate);
        (0..self.lstm.hidden_size())
            .map(|_| if rng.gen::<f64>() < rate { 0.0 } else { keep })
            .collect()
    }

    pub fn forward_encoded(&self, encoded: EncodedInstance, mask: Option<Vec<f64>>) -> Result<ForwardPass> {
        if encoded.is_empty() {
            return Err(Error::invalid("cannot classify an empty instance"));
        }
        let xs = self.embeddings.embed(&encoded);
        let trace = lstm_forward(&self.lstm, &xs)?;
        let dense_input: Vec<f64> = match &mask {
            Some(m) => trace.last_hidden().iter().zip(m).map(|(h, k)| h * k).collect(),
            None => trace.last_hidden().to_vec(),
        };
        let dense_pre = self.dense_weights.affine(&dense_input, &self.dense_bias);
        let dense_out: Vec<f64> = dense_pre.iter().map(|&z| z.max(0.0)).collect();
        let logits = self.output_weights.affine(&dense_out, &self.output_bias);
        Ok(ForwardPass {
            encoded,
            trace,
            mask,
            dense_input,
            dense_pre,
            dense_out,
            probs: nn::softmax(&logits),
        })
    }

    /// Class probabilities. Dropout is applied only when `training` is set.
    pub fn forward<R: Rng>(&self, inst: &SdpInstance, training: bool, rng: &mut R) -> Result<Vec<f64>> {
        let mask = (training && self.hyper.dropout > 0.0).then(|| self.dropout_mask(rng));
        Ok(self.forward_encoded(self.embeddings.encode(inst), mask)?.probs)
    }

    /// Inference-mode probabilities.
    pub fn probabilities(&self, inst: &SdpInstance) -> Result<Vec<f64>> {
        Ok(self.forward_encoded(self.embeddings.encode(inst), None)?.probs)
    }

    pub fn predict(&self, inst: &SdpInstance) -> Result<RelationLabel> {
        Ok(RelationLabel::from_index(nn::argmax(&self.probabilities(inst)?)))
    }

    pub fn zero_grads(&self) -> RelexGrads {
        RelexGrads {
            embeddings: Default::default(),
            lstm: LstmParams::zeros(self.lstm.hidden_size(), self.lstm.input_size()),
            dense_weights: Matrix::zeros(self.dense_weights.rows, self.dense_weights.cols),
            dense_bias: vec![0.0; self.dense_bias.len()],
            output_weights: Matrix::zeros(self.output_weights.rows, self.output_weights.cols),
            output_bias: vec![0.0; self.output_bias.len()],
        }
    }

    /// Cross-entropy of one pass against `gold`, accumulating gradients.
    pub fn backward(&self, pass: &ForwardPass, gold: RelationLabel, grads: &mut RelexGrads) -> f64 {
        let g = gold.index();
        let loss = nn::cross_entropy(&pass.probs, g);

        let mut dlogits = pass.probs.clone();
        dlogits[g] -= 1.0;
        grads.output_weights.add_outer(&dlogits, &pass.dense_out);
        nn::axpy(1.0, &dlogits, &mut grads.output_bias);

        let mut dpre = vec![0.0; pass.dense_out.len()];
        self.output_weights.matvec_t_acc(&dlogits, &mut dpre);
        for (d, &z) in dpre.iter_mut().zip(&pass.dense_pre) {
            if z <= 0.0 {
                *d = 0.0;
            }
        }
        grads.dense_weights.add_outer(&dpre, &pass.dense_input);
        nn::axpy(1.0, &dpre, &mut grads.dense_bias);

        let mut dh = vec![0.0; pass.dense_input.len()];
        self.dense_weights.matvec_t_acc(&dpre, &mut dh);
        if let Some(m) = &pass.mask {
            dh.iter_mut().zip(m).for_each(|(d, k)| *d *= k);
        }

        let dxs = lstm_backward(&self.lstm, &pass.trace, &dh, &mut grads.lstm);
        let off = self.embeddings.offsets();
        let enc = &pass.encoded;
        for (t, dx) in dxs.iter().enumerate() {
            let ids = [enc.words[t], enc.concepts[t], enc.deprels[t], enc.tags[t]];
            for c in 0..4 {
                grads.embeddings[c].add(ids[c], &dx[off[c]..off[c + 1]]);
            }
        }
        loss
    }

    /// Loss and gradient for one instance with no dropout.
    pub fn loss_and_grad(&self, inst: &SdpInstance) -> Result<(f64, RelexGrads)> {
        let pass = self.forward_encoded(self.embeddings.encode(inst), None)?;
        let mut grads = self.zero_grads();
        let loss = self.backward(&pass, inst.label, &mut grads);
        Ok((loss, grads))
    }

    /// Loss only, no dropout.
    pub fn loss(&self, inst: &SdpInstance) -> Result<f64> {
        Ok(nn::cross_entropy(&self.probabilities(inst)?, inst.label.index()))
    }

    /// All parameter tensors: the four embedding tables, the eight LSTM
    /// tensors, then dense and output weights and biases.
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut v: Vec<&mut [f64]> = Vec::with_capacity(16);
        for m in self.embeddings.tables_mut() {
            v.push(&mut m.data);
        }
        v.extend(self.lstm.tensors_mut());
        v.push(&mut self.dense_weights.data);
        v.push(&mut self.dense_bias);
        v.push(&mut self.output_weights.data);
        v.push(&mut self.output_bias);
        v
    }

    /// Gradients flattened in [`RelexModel::tensors_mut`] order.
    pub fn flatten_grads(&self, grads: &RelexGrads) -> Vec<Vec<f64>> {
        let mut v = Vec::with_capacity(16);
        for (c, m) in self.embeddings.tables().iter().enumerate() {
            v.push(grads.embeddings[c].to_dense(m.rows, m.cols));
        }
        v.extend(grads.lstm.tensors().iter().map(|t| t.to_vec()));
        v.push(grads.dense_weights.data.clone());
        v.push(grads.dense_bias.clone());
        v.push(grads.output_weights.data.clone());
        v.push(grads.output_bias.clone());
        v
    }

    fn is_finite(&self) -> bool {
        self.lstm.is_finite()
            && self.dense_weights.is_finite()
            && self.output_weights.is_finite()
            && self.embeddings.tables().iter().all(|m| m.is_finite())
    }

    pub fn save<W: Write>(&self, out: W) -> Result<()> {
        let mut w = ModelWriter::new(out, MAGIC, VERSION)?;
        w.str(&serde_json::to_string(&self.hyper).expect("hyperparameters serialize"))?;
        let e = &self.embeddings;
        for v in [&e.words, &e.concepts, &e.deprels, &e.tags] {
            w.strings(v.items())?;
        }
        for m in e.tables() {
            w.matrix(m)?;
        }
        for m in [
            &self.lstm.forget_weights,
            &self.lstm.input_weights,
            &self.lstm.candidate_weights,
            &self.lstm.output_weights,
        ] {
            w.matrix(m)?;
        }
        for b in [
            &self.lstm.forget_bias,
            &self.lstm.input_bias,
            &self.lstm.candidate_bias,
            &self.lstm.output_bias,
        ] {
            w.floats(b)?;
        }
        w.matrix(&self.dense_weights)?;
        w.floats(&self.dense_bias)?;
        w.matrix(&self.output_weights)?;
        w.floats(&self.output_bias)?;
        w.finish()?;
        Ok(())
    }

    pub fn load<R: Read>(input: R) -> Result<Self> {
        let mut r = ModelReader::new(input, MAGIC, VERSION)?;
        let hyper: RelexHyper = serde_json::from_str(&r.str()?)
            .map_err(|e| Error::Format(format!("bad header: {}", e)))?;
        let words = Vocab::from_items(r.strings()?);
        let concepts = Vocab::from_items(r.strings()?);
        let deprels = Vocab::from_items(r.strings()?);
        let tags = Vocab::from_items(r.strings()?);
        let word = r.matrix()?;
        if word.rows != words.len() {
            return Err(Error::Format("word table does not match its vocabulary".into()));
        }
        let d = hyper.embed_dim;
        let concept = r.matrix_shaped(concepts.len(), d, "concept table")?;
        let deprel = r.matrix_shaped(deprels.len(), d, "deprel table")?;
        let pos = r.matrix_shaped(tags.len(), d, "POS table")?;
        let embeddings = EmbeddingTables {
            words,
            word,
            concepts,
            concept,
            deprels,
            deprel,
            tags,
            pos,
        };
        let h = hyper.hidden;
        let cols = h + embeddings.input_dim();
        let mut lstm = LstmParams::zeros(h, embeddings.input_dim());
        lstm.forget_weights = r.matrix_shaped(h, cols, "forget weights")?;
        lstm.input_weights = r.matrix_shaped(h, cols, "input weights")?;
        lstm.candidate_weights = r.matrix_shaped(h, cols, "candidate weights")?;
        lstm.output_weights = r.matrix_shaped(h, cols, "output-gate weights")?;
        lstm.forget_bias = r.floats_len(h, "forget bias")?;
        lstm.input_bias = r.floats_len(h, "input bias")?;
        lstm.candidate_bias = r.floats_len(h, "candidate bias")?;
        lstm.output_bias = r.floats_len(h, "output-gate bias")?;
        Ok(RelexModel {
            embeddings,
            lstm,
            dense_weights: r.matrix_shaped(hyper.dense, h, "dense weights")?,
            dense_bias: r.floats_len(hyper.dense, "dense bias")?,
            output_weights: r.matrix_shaped(RelationLabel::COUNT, hyper.dense, "output weights")?,
            output_bias: r.floats_len(RelationLabel::COUNT, "output bias")?,
            hyper,
        })
    }
}

/// RMSProp caches for every parameter. Embedding rows are updated only when
/// they receive a gradient.
struct Optimizer {
    rule: RmsProp,
    dense: Vec<Vec<f64>>,
    tables: [Matrix; 4],
}

impl Optimizer {
    fn new(model: &RelexModel) -> Self {
        let dense = model
            .lstm
            .tensors()
            .iter()
            .map(|t| t.len())
            .chain([
                model.dense_weights.data.len(),
                model.dense_bias.len(),
                model.output_weights.data.len(),
                model.output_bias.len(),
            ])
            .map(|n| vec![0.0; n])
            .collect();
        let t = model.embeddings.tables();
        Optimizer {
            rule: model.hyper.optimizer(),
            dense,
            tables: [0, 1, 2, 3].map(|c| Matrix::zeros(t[c].rows, t[c].cols)),
        }
    }

    fn step(&mut self, model: &mut RelexModel, grads: &RelexGrads) {
        let mut params: Vec<&mut [f64]> = model.lstm.tensors_mut();
        params.push(&mut model.dense_weights.data);
        params.push(&mut model.dense_bias);
        params.push(&mut model.output_weights.data);
        params.push(&mut model.output_bias);
        let mut g: Vec<&[f64]> = grads.lstm.tensors();
        g.push(&grads.dense_weights.data);
        g.push(&grads.dense_bias);
        g.push(&grads.output_weights.data);
        g.push(&grads.output_bias);
        for ((p, g), c) in params.into_iter().zip(g).zip(self.dense.iter_mut()) {
            self.rule.step(p, g, c);
        }
        for (c, table) in model.embeddings.tables_mut().into_iter().enumerate() {
            for (&row, grad) in &grads.embeddings[c].rows {
                self.rule.step(table.row_mut(row), grad, self.tables[c].row_mut(row));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelexEpoch {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug)]
pub struct TrainedRelex {
    pub model: RelexModel,
    pub log: Vec<RelexEpoch>,
}

/// Fraction of `data` the model labels correctly in inference mode.
pub fn accuracy(model: &RelexModel, data: &[SdpInstance]) -> Result<f64> {
    if data.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0;
    for inst in data {
        if model.predict(inst)? == inst.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}

pub fn train_relex(
    data: &[SdpInstance],
    hyper: &RelexHyper,
    pretrained: Option<&WordVectors>,
) -> Result<TrainedRelex> {
    if data.is_empty() {
        return Err(Error::invalid("no training instances"));
    }
    if !(0.0..1.0).contains(&hyper.dropout) {
        return Err(Error::invalid(format!("dropout {} outside [0, 1)", hyper.dropout)));
    }
    for (i, inst) in data.iter().enumerate() {
        if inst.is_empty() || !inst.is_aligned() {
            return Err(Error::invalid(format!("instance {} is empty or misaligned", i + 1)));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let tables = EmbeddingTables::build(data, hyper.embed_dim, pretrained, hyper.word_init_scale, &mut rng);
    let mut model = RelexModel::new(tables, hyper, &mut rng);
    let mut opt = Optimizer::new(&model);
    let encoded: Vec<EncodedInstance> = data.iter().map(|i| model.embeddings.encode(i)).collect();

    let mut log = Vec::with_capacity(hyper.epochs);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 1..=hyper.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &i in &order {
            let mask = (hyper.dropout > 0.0).then(|| model.dropout_mask(&mut rng));
            let pass = model.forward_encoded(encoded[i].clone(), mask)?;
            let mut grads = model.zero_grads();
            let loss = model.backward(&pass, data[i].label, &mut grads);
            if !loss.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite loss at epoch {}, instance {}",
                    epoch,
                    i + 1
                )));
            }
            total += loss;
            opt.step(&mut model, &grads);
        }
        if !model.is_finite() {
            return Err(Error::Numerical(format!("non-finite weights after epoch {}", epoch)));
        }
        let stats = RelexEpoch {
            epoch,
            loss: total / data.len() as f64,
            accuracy: accuracy(&model, data)?,
        };
        info!("relation epoch {}: loss {:.4}, accuracy {:.4}", epoch, stats.loss, stats.accuracy);
        let done = hyper.stop_at_accuracy.is_some_and(|t| stats.accuracy >= t);
        log.push(stats);
        if done {
            break;
        }
    }
    Ok(TrainedRelex { model, log })
}
