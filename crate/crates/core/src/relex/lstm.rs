//! Single-layer LSTM with full backpropagation through time.
//!
//! Every gate reads the concatenation `z_t = [h_{t-1}, x_t]`:
//!
//! ```text
//! f_t  = σ(W_f·z_t + b_f)
//! i_t  = σ(W_i·z_t + b_i)
//! C̄_t  = tanh(W_c·z_t + b_c)
//! o_t  = σ(W_o·z_t + b_o)
//! C_t  = f_t * C_{t-1} + i_t * C̄_t
//! h_t  = o_t * tanh(C_t)
//! ```
//!
//! with `h_0 = C_0 = 0`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::{self, Matrix};

#[derive(Clone, Debug, PartialEq)]
pub struct LstmParams {
    pub forget_weights: Matrix,
    pub input_weights: Matrix,
    pub candidate_weights: Matrix,
    pub output_weights: Matrix,
    pub forget_bias: Vec<f64>,
    pub input_bias: Vec<f64>,
    pub candidate_bias: Vec<f64>,
    pub output_bias: Vec<f64>,
}

/// Per-step values kept for the backward pass.
#[derive(Clone, Debug)]
pub struct LstmStep {
    pub concat: Vec<f64>,
    pub forget: Vec<f64>,
    pub input: Vec<f64>,
    pub candidate: Vec<f64>,
    pub output: Vec<f64>,
    pub cell_prev: Vec<f64>,
    pub cell: Vec<f64>,
    pub cell_tanh: Vec<f64>,
    pub hidden: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LstmTrace {
    pub steps: Vec<LstmStep>,
}

impl LstmTrace {
    pub fn hidden_states(&self) -> Vec<&[f64]> {
        self.steps.iter().map(|s| s.hidden.as_slice()).collect()
    }

    pub fn last_hidden(&self) -> &[f64] {
        &self.steps.last().expect("non-empty sequence").hidden
    }

    pub fn last_cell(&self) -> &[f64] {
        &self.steps.last().expect("non-empty sequence").cell
    }
}

impl LstmParams {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        let m = || Matrix::zeros(hidden, hidden + input);
        LstmParams {
            forget_weights: m(),
            input_weights: m(),
            candidate_weights: m(),
            output_weights: m(),
            forget_bias: vec![0.0; hidden],
            input_bias: vec![0.0; hidden],
            candidate_bias: vec![0.0; hidden],
            output_bias: vec![0.0; hidden],
        }
    }

    /// Weights uniform in `[-scale, scale]`, zero biases.
    pub fn uniform<R: Rng>(hidden: usize, input: usize, scale: f64, rng: &mut R) -> Self {
        let cols = hidden + input;
        LstmParams {
            forget_weights: Matrix::uniform(hidden, cols, scale, rng),
            input_weights: Matrix::uniform(hidden, cols, scale, rng),
            candidate_weights: Matrix::uniform(hidden, cols, scale, rng),
            output_weights: Matrix::uniform(hidden, cols, scale, rng),
            forget_bias: vec![0.0; hidden],
            input_bias: vec![0.0; hidden],
            candidate_bias: vec![0.0; hidden],
            output_bias: vec![0.0; hidden],
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.forget_bias.len()
    }

    pub fn input_size(&self) -> usize {
        self.forget_weights.cols - self.hidden_size()
    }

    fn check(&self) -> Result<()> {
        let h = self.hidden_size();
        let cols = self.forget_weights.cols;
        let ok = [
            &self.forget_weights,
            &self.input_weights,
            &self.candidate_weights,
            &self.output_weights,
        ]
        .iter()
        .all(|m| m.rows == h && m.cols == cols)
            && [&self.input_bias, &self.candidate_bias, &self.output_bias]
                .iter()
                .all(|b| b.len() == h)
            && cols >= h;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("inconsistent LSTM parameter shapes"))
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            &mut self.forget_weights.data,
            &mut self.input_weights.data,
            &mut self.candidate_weights.data,
            &mut self.output_weights.data,
            &mut self.forget_bias,
            &mut self.input_bias,
            &mut self.candidate_bias,
            &mut self.output_bias,
        ]
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        vec![
            &self.forget_weights.data,
            &self.input_weights.data,
            &self.candidate_weights.data,
            &self.output_weights.data,
            &self.forget_bias,
            &self.input_bias,
            &self.candidate_bias,
            &self.output_bias,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }
}

/// Runs the recurrence over `xs`.
pub fn lstm_forward(p: &LstmParams, xs: &[Vec<f64>]) -> Result<LstmTrace> {
    p.check()?;
    if xs.is_empty() {
        return Err(Error::invalid("LSTM input sequence is empty"));
    }
    let h = p.hidden_size();
    let input = p.input_size();
    let mut hidden = vec![0.0; h];
    let mut cell = vec![0.0; h];
    let mut steps = Vec::with_capacity(xs.len());
    for (t, x) in xs.iter().enumerate() {
        if x.len() != input {
            return Err(Error::invalid(format!(
                "input {} has dimension {}, LSTM expects {}",
                t,
                x.len(),
                input
            )));
        }
        let mut concat = Vec::with_capacity(h + input);
        concat.extend_from_slice(&hidden);
        concat.extend_from_slice(x);

        let forget: Vec<f64> = p.forget_weights.affine(&concat, &p.forget_bias).into_iter().map(nn::sigmoid).collect();
        let input_gate: Vec<f64> = p.input_weights.affine(&concat, &p.input_bias).into_iter().map(nn::sigmoid).collect();
        let candidate: Vec<f64> = p.candidate_weights.affine(&concat, &p.candidate_bias).into_iter().map(f64::tanh).collect();
        let output: Vec<f64> = p.output_weights.affine(&concat, &p.output_bias).into_iter().map(nn::sigmoid).collect();

        let cell_prev = cell;
        // forget first, then add the gated candidate
        let new_cell: Vec<f64> = (0..h)
            .map(|k| cell_prev[k] * forget[k] + input_gate[k] * candidate[k])
            .collect();
        let cell_tanh: Vec<f64> = new_cell.iter().map(|c| c.tanh()).collect();
        hidden = (0..h).map(|k| cell_tanh[k] * output[k]).collect();
        cell = new_cell.clone();

        steps.push(LstmStep {
            concat,
            forget,
            input: input_gate,
            candidate,
            output,
            cell_prev,
            cell: new_cell,
            cell_tanh,
            hidden: hidden.clone(),
        });
    }
    Ok(LstmTrace { steps })
}

/// Backpropagates a gradient on the final hidden state through time.
/// Accumulates parameter gradients into `grads` and returns the gradient
/// with respect to every input vector.
pub fn lstm_backward(
    p: &LstmParams,
    trace: &LstmTrace,
    d_last_hidden: &[f64],
    grads: &mut LstmParams,
) -> Vec<Vec<f64>> {
    let h = p.hidden_size();
    let mut dh = d_last_hidden.to_vec();
    let mut dc_next = vec![0.0; h];
    let mut dxs = vec![Vec::new(); trace.steps.len()];

    let mut dz_f = vec![0.0; h];
    let mut dz_i = vec![0.0; h];
    let mut dz_c = vec![0.0; h];
    let mut dz_o = vec![0.0; h];
    for (t, s) in trace.steps.iter().enumerate().rev() {
        for k in 0..h {
            let d_out = dh[k] * s.cell_tanh[k];
            let dc = dc_next[k] + dh[k] * s.output[k] * (1.0 - s.cell_tanh[k] * s.cell_tanh[k]);
            let d_forget = dc * s.cell_prev[k];
            let d_input = dc * s.candidate[k];
            let d_candidate = dc * s.input[k];
            dc_next[k] = dc * s.forget[k];

            dz_f[k] = d_forget * s.forget[k] * (1.0 - s.forget[k]);
            dz_i[k] = d_input * s.input[k] * (1.0 - s.input[k]);
            dz_c[k] = d_candidate * (1.0 - s.candidate[k] * s.candidate[k]);
            dz_o[k] = d_out * s.output[k] * (1.0 - s.output[k]);
        }

        grads.forget_weights.add_outer(&dz_f, &s.concat);
        grads.input_weights.add_outer(&dz_i, &s.concat);
        grads.candidate_weights.add_outer(&dz_c, &s.concat);
        grads.output_weights.add_outer(&dz_o, &s.concat);
        nn::axpy(1.0, &dz_f, &mut grads.forget_bias);
        nn::axpy(1.0, &dz_i, &mut grads.input_bias);
        nn::axpy(1.0, &dz_c, &mut grads.candidate_bias);
        nn::axpy(1.0, &dz_o, &mut grads.output_bias);

        let mut dconcat = vec![0.0; s.concat.len()];
        p.forget_weights.matvec_t_acc(&dz_f, &mut dconcat);
        p.input_weights.matvec_t_acc(&dz_i, &mut dconcat);
        p.candidate_weights.matvec_t_acc(&dz_c, &mut dconcat);
        p.output_weights.matvec_t_acc(&dz_o, &mut dconcat);

        dh.copy_from_slice(&dconcat[..h]);
        dxs[t] = dconcat[h..].to_vec();
    }
    dxs
}
