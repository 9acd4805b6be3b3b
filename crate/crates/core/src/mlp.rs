//! Feed-forward network with one sigmoid hidden layer, trained online by
//! backpropagation with momentum on the sum-of-squared-error loss.
//!
//! Bias terms are carried as an extra `+1` input appended to each layer, so
//! a layer's weight matrix has one more column than its input count. Targets
//! use a 1-out-of-m encoding with configurable high/low values; decisions are
//! an argmax over the output activations.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::XorShiftRng;

/// Layer sizes: inputs, hidden neurons, output classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MlpLayout {
    pub n_in: usize,
    pub n_hidden: usize,
    pub n_out: usize,
}

impl MlpLayout {
    pub fn new(n_in: usize, n_hidden: usize, n_out: usize) -> Result<Self> {
        if n_in == 0 || n_hidden == 0 || n_out == 0 {
            return Err(Error::InvalidConfig(format!(
                "layer sizes must be positive, got {n_in}-{n_hidden}-{n_out}"
            )));
        }
        Ok(MlpLayout {
            n_in,
            n_hidden,
            n_out,
        })
    }
}

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Weights plus momentum buffers. The momentum buffers hold the previous
/// applied weight deltas and start (and load) as zero.
#[derive(Clone, Debug)]
pub struct MlpModel {
    layout: MlpLayout,
    w1: Matrix,
    w2: Matrix,
    v1: Matrix,
    v2: Matrix,
}

/// Training hyperparameters. Defaults: learning rate 0.8, momentum 0.7,
/// up to 1000 epochs, early stop at mean per-sample SSE 0.01, targets 0.9/0.1.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub eta: f64,
    pub alpha: f64,
    pub max_epochs: usize,
    pub target_sse: f64,
    pub seed: u64,
    pub target_hi: f64,
    pub target_lo: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            eta: 0.8,
            alpha: 0.7,
            max_epochs: 1000,
            target_sse: 0.01,
            seed: 1,
            target_hi: 0.9,
            target_lo: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.eta.is_finite() || self.eta <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.eta
            )));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "momentum must lie in [0, 1), got {}",
                self.alpha
            )));
        }
        if self.target_lo >= self.target_hi {
            return Err(Error::InvalidConfig(format!(
                "target_lo {} must be below target_hi {}",
                self.target_lo, self.target_hi
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    MaxEpochs,
    SseThreshold,
}

/// Per-epoch mean sample SSE and why training stopped.
#[derive(Clone, Debug)]
pub struct TrainHistory {
    pub epoch_sse: Vec<f64>,
    pub epochs_run: usize,
    pub stop: StopReason,
}

#[inline]
fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Fresh model with weights drawn uniformly from `[-0.5, 0.5)` by the seeded
/// generator of [`crate::rng`], filling W1 row-major then W2 row-major.
pub fn init_model(layout: MlpLayout, seed: u64) -> MlpModel {
    let mut rng = XorShiftRng::new(seed);
    let mut w1 = Matrix::zeros(layout.n_hidden, layout.n_in + 1);
    let mut w2 = Matrix::zeros(layout.n_out, layout.n_hidden + 1);
    for w in w1.as_mut_slice() {
        *w = rng.next_weight();
    }
    for w in w2.as_mut_slice() {
        *w = rng.next_weight();
    }
    let v1 = Matrix::zeros(layout.n_hidden, layout.n_in + 1);
    let v2 = Matrix::zeros(layout.n_out, layout.n_hidden + 1);
    MlpModel {
        layout,
        w1,
        w2,
        v1,
        v2,
    }
}

/// 1-out-of-m target vector: `target_hi` at the label index, `target_lo`
/// elsewhere.
pub fn encode_targets(label: usize, n_out: usize, cfg: &TrainConfig) -> Vec<f64> {
    let mut t = vec![cfg.target_lo; n_out];
    t[label] = cfg.target_hi;
    t
}

struct Scratch {
    hidden: Vec<f64>,
    output: Vec<f64>,
    delta_out: Vec<f64>,
    delta_hidden: Vec<f64>,
}

impl Scratch {
    fn new(layout: MlpLayout) -> Self {
        Scratch {
            hidden: vec![0.0; layout.n_hidden],
            output: vec![0.0; layout.n_out],
            delta_out: vec![0.0; layout.n_out],
            delta_hidden: vec![0.0; layout.n_hidden],
        }
    }
}

impl MlpModel {
    pub fn layout(&self) -> MlpLayout {
        self.layout
    }

    pub fn w1(&self) -> &Matrix {
        &self.w1
    }

    pub fn w2(&self) -> &Matrix {
        &self.w2
    }

    /// Total number of weights, W1 then W2 in row-major order.
    pub fn param_count(&self) -> usize {
        self.w1.data.len() + self.w2.data.len()
    }

    pub fn param(&self, i: usize) -> f64 {
        if i < self.w1.data.len() {
            self.w1.data[i]
        } else {
            self.w2.data[i - self.w1.data.len()]
        }
    }

    pub fn set_param(&mut self, i: usize, v: f64) {
        if i < self.w1.data.len() {
            self.w1.data[i] = v;
        } else {
            self.w2.data[i - self.w1.data.len()] = v;
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.layout.n_in {
            return Err(Error::DimensionMismatch {
                expected: self.layout.n_in,
                found: x.len(),
            });
        }
        Ok(())
    }

    fn forward_into(&self, x: &[f64], hidden: &mut [f64], output: &mut [f64]) {
        let n_in = self.layout.n_in;
        let n_hidden = self.layout.n_hidden;
        for j in 0..n_hidden {
            let row = self.w1.row(j);
            let mut net = row[n_in]; // bias
            for i in 0..n_in {
                net += row[i] * x[i];
            }
            hidden[j] = sigmoid(net);
        }
        for k in 0..self.layout.n_out {
            let row = self.w2.row(k);
            let mut net = row[n_hidden];
            for j in 0..n_hidden {
                net += row[j] * hidden[j];
            }
            output[k] = sigmoid(net);
        }
    }

    /// Hidden and output activations for one input.
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_input(x)?;
        let mut hidden = vec![0.0; self.layout.n_hidden];
        let mut output = vec![0.0; self.layout.n_out];
        self.forward_into(x, &mut hidden, &mut output);
        Ok((hidden, output))
    }

    /// Argmax class; ties break toward the lowest index.
    pub fn classify(&self, x: &[f64]) -> Result<usize> {
        let (_, output) = self.forward(x)?;
        let mut best = 0;
        for (k, &o) in output.iter().enumerate() {
            if o > output[best] {
                best = k;
            }
        }
        Ok(best)
    }

    /// Sum of squared errors of one sample against a target vector.
    pub fn sample_sse(&self, x: &[f64], targets: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        if targets.len() != self.layout.n_out {
            return Err(Error::DimensionMismatch {
                expected: self.layout.n_out,
                found: targets.len(),
            });
        }
        let (_, output) = self.forward(x)?;
        Ok(targets
            .iter()
            .zip(&output)
            .map(|(t, o)| (t - o) * (t - o))
            .sum())
    }

    /// Backpropagated gradients of the halved sample SSE (`E/2` for
    /// `E = sum (t-o)^2`) with respect to every weight, without touching the
    /// model. Halving the loss gives the conventional delta rule
    /// `delta_k = -(t_k - o_k) o_k (1 - o_k)`, which keeps learning-rate
    /// values on their classic scale. Returns `(dW1, dW2, sse)` where `sse`
    /// is the unhalved sample error.
    pub fn gradients(&self, x: &[f64], targets: &[f64]) -> Result<(Matrix, Matrix, f64)> {
        self.check_input(x)?;
        if targets.len() != self.layout.n_out {
            return Err(Error::DimensionMismatch {
                expected: self.layout.n_out,
                found: targets.len(),
            });
        }
        let mut scratch = Scratch::new(self.layout);
        let mut g1 = Matrix::zeros(self.layout.n_hidden, self.layout.n_in + 1);
        let mut g2 = Matrix::zeros(self.layout.n_out, self.layout.n_hidden + 1);
        let sse = self.backprop(x, targets, &mut scratch, &mut g1, &mut g2);
        Ok((g1, g2, sse))
    }

    fn backprop(
        &self,
        x: &[f64],
        targets: &[f64],
        s: &mut Scratch,
        g1: &mut Matrix,
        g2: &mut Matrix,
    ) -> f64 {
        let n_in = self.layout.n_in;
        let n_hidden = self.layout.n_hidden;
        let n_out = self.layout.n_out;

        self.forward_into(x, &mut s.hidden, &mut s.output);

        let mut sse = 0.0;
        for k in 0..n_out {
            let err = targets[k] - s.output[k];
            sse += err * err;
            // d(E/2)/d(net_k) for E = sum (t-o)^2 and o = sigmoid(net).
            s.delta_out[k] = -err * s.output[k] * (1.0 - s.output[k]);
        }

        for j in 0..n_hidden {
            let mut back = 0.0;
            for k in 0..n_out {
                back += s.delta_out[k] * self.w2.get(k, j);
            }
            s.delta_hidden[j] = back * s.hidden[j] * (1.0 - s.hidden[j]);
        }

        for k in 0..n_out {
            let row = &mut g2.data[k * (n_hidden + 1)..(k + 1) * (n_hidden + 1)];
            for j in 0..n_hidden {
                row[j] = s.delta_out[k] * s.hidden[j];
            }
            row[n_hidden] = s.delta_out[k];
        }
        for j in 0..n_hidden {
            let row = &mut g1.data[j * (n_in + 1)..(j + 1) * (n_in + 1)];
            for i in 0..n_in {
                row[i] = s.delta_hidden[j] * x[i];
            }
            row[n_in] = s.delta_hidden[j];
        }
        sse
    }

    fn apply_deltas(&mut self, g1: &Matrix, g2: &Matrix, cfg: &TrainConfig) {
        for ((w, v), g) in self
            .w1
            .data
            .iter_mut()
            .zip(&mut self.v1.data)
            .chain(self.w2.data.iter_mut().zip(&mut self.v2.data))
            .zip(g1.data.iter().chain(&g2.data))
        {
            let delta = -cfg.eta * g + cfg.alpha * *v;
            *w += delta;
            *v = delta;
        }
    }

    fn weights_finite(&self) -> bool {
        self.w1
            .data
            .iter()
            .chain(&self.w2.data)
            .all(|w| w.is_finite())
    }
}

/// One online update: backpropagate the sample, apply
/// `delta = -eta * gradient + alpha * previous_delta` to every weight (the
/// gradient is of the halved SSE, see [`MlpModel::gradients`]), and remember
/// the applied deltas in the momentum buffers. Returns the sample SSE
/// measured before the update.
pub fn train_step(model: &mut MlpModel, x: &[f64], label: usize, cfg: &TrainConfig) -> Result<f64> {
    cfg.validate()?;
    if label >= model.layout.n_out {
        return Err(Error::InvalidLabel {
            label,
            classes: model.layout.n_out,
        });
    }
    let targets = encode_targets(label, model.layout.n_out, cfg);
    let (g1, g2, sse) = model.gradients(x, &targets)?;
    if !sse.is_finite() {
        return Err(Error::Divergence { epoch: 0 });
    }
    model.apply_deltas(&g1, &g2, cfg);
    Ok(sse)
}

/// Train over the whole set: each epoch visits every sample once in an order
/// reshuffled by the seeded generator, stopping at `max_epochs` or when the
/// epoch's mean per-sample SSE drops to `target_sse`.
pub fn train(
    model: &mut MlpModel,
    inputs: &[Vec<f64>],
    labels: &[usize],
    cfg: &TrainConfig,
) -> Result<TrainHistory> {
    cfg.validate()?;
    if inputs.is_empty() {
        return Err(Error::TooFewSamples { have: 0, need: 1 });
    }
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            found: labels.len(),
        });
    }
    for x in inputs {
        model.check_input(x)?;
    }
    for &label in labels {
        if label >= model.layout.n_out {
            return Err(Error::InvalidLabel {
                label,
                classes: model.layout.n_out,
            });
        }
    }

    let mut rng = XorShiftRng::new(cfg.seed);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut scratch = Scratch::new(model.layout);
    let mut g1 = Matrix::zeros(model.layout.n_hidden, model.layout.n_in + 1);
    let mut g2 = Matrix::zeros(model.layout.n_out, model.layout.n_hidden + 1);

    let mut history = TrainHistory {
        epoch_sse: Vec::new(),
        epochs_run: 0,
        stop: StopReason::MaxEpochs,
    };

    for epoch in 0..cfg.max_epochs {
        rng.shuffle(&mut order);
        let mut epoch_sse = 0.0;
        for &i in &order {
            let targets = encode_targets(labels[i], model.layout.n_out, cfg);
            let sse = model.backprop(&inputs[i], &targets, &mut scratch, &mut g1, &mut g2);
            if !sse.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            model.apply_deltas(&g1, &g2, cfg);
            epoch_sse += sse;
        }
        let mean = epoch_sse / inputs.len() as f64;
        if !mean.is_finite() || !model.weights_finite() {
            return Err(Error::Divergence { epoch });
        }
        history.epoch_sse.push(mean);
        history.epochs_run = epoch + 1;
        if mean <= cfg.target_sse {
            history.stop = StopReason::SseThreshold;
            break;
        }
    }
    Ok(history)
}

/// Write the model as a text file: a `MLP1` magic line, a layout line, then
/// one line per weight row (W1 rows before W2 rows, bias column last). Values
/// use the shortest decimal form that parses back to the identical `f64`, so
/// save/load round-trips exactly. Momentum buffers are not persisted.
pub fn save_model(model: &MlpModel, path: &Path) -> Result<()> {
    let mut out = String::new();
    let l = model.layout;
    writeln!(out, "MLP1").unwrap();
    writeln!(out, "{} {} {}", l.n_in, l.n_hidden, l.n_out).unwrap();
    for m in [&model.w1, &model.w2] {
        for r in 0..m.rows() {
            let row = m.row(r);
            for (i, w) in row.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{w}").unwrap();
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<MlpModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let fmt_err = |detail: &str| Error::ModelFormat {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    };

    let mut lines = text.lines();
    match lines.next() {
        Some("MLP1") => {}
        other => return Err(fmt_err(&format!("bad magic line {other:?}"))),
    }
    let dims: Vec<usize> = lines
        .next()
        .ok_or_else(|| fmt_err("missing layout line"))?
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| fmt_err(&format!("bad layout line: {e}")))?;
    let &[n_in, n_hidden, n_out] = dims.as_slice() else {
        return Err(fmt_err("layout line must hold three sizes"));
    };
    let layout = MlpLayout::new(n_in, n_hidden, n_out)
        .map_err(|e| fmt_err(&format!("invalid layout: {e}")))?;

    let mut read_matrix = |rows: usize, cols: usize| -> Result<Matrix> {
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| fmt_err(&format!("missing weight row {r}")))?;
            let mut count = 0;
            for (c, tok) in line.split_whitespace().enumerate() {
                if c >= cols {
                    return Err(fmt_err(&format!("row {r} has more than {cols} weights")));
                }
                let w: f64 = tok
                    .parse()
                    .map_err(|e| fmt_err(&format!("bad weight {tok:?}: {e}")))?;
                m.set(r, c, w);
                count += 1;
            }
            if count != cols {
                return Err(fmt_err(&format!(
                    "row {r} holds {count} weights, expected {cols}"
                )));
            }
        }
        Ok(m)
    };

    let w1 = read_matrix(layout.n_hidden, layout.n_in + 1)?;
    let w2 = read_matrix(layout.n_out, layout.n_hidden + 1)?;
    if !w1
        .as_slice()
        .iter()
        .chain(w2.as_slice())
        .all(|w| w.is_finite())
    {
        return Err(Error::ModelFormat {
            path: path.to_path_buf(),
            detail: "model holds non-finite weights".into(),
        });
    }
    Ok(MlpModel {
        layout,
        v1: Matrix::zeros(w1.rows(), w1.cols()),
        v2: Matrix::zeros(w2.rows(), w2.cols()),
        w1,
        w2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(n_in: usize, n_hidden: usize, n_out: usize) -> MlpLayout {
        MlpLayout::new(n_in, n_hidden, n_out).unwrap()
    }

    #[test]
    fn init_is_deterministic() {
        let a = init_model(layout(6, 5, 4), 99);
        let b = init_model(layout(6, 5, 4), 99);
        assert_eq!(a.w1, b.w1);
        assert_eq!(a.w2, b.w2);
    }

    #[test]
    fn init_shapes_follow_layout() {
        let m = init_model(layout(2, 2, 1), 0);
        assert_eq!((m.w1.rows(), m.w1.cols()), (2, 3));
        assert_eq!((m.w2.rows(), m.w2.cols()), (1, 3));
        assert!(m.v1.data.iter().all(|&v| v == 0.0));
        assert!(m.v2.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn init_weights_are_centered_uniform() {
        // ~1e5 draws: all inside [-0.5, 0.5), mean within 0.01 of zero.
        let m = init_model(layout(100, 990, 2), 7);
        let weights: Vec<f64> = m.w1.data.iter().chain(&m.w2.data).copied().collect();
        assert!(weights.len() >= 100_000);
        assert!(weights.iter().all(|w| (-0.5..0.5).contains(w)));
        let mean = weights.iter().sum::<f64>() / weights.len() as f64;
        assert!(mean.abs() < 0.01, "mean drifted to {mean}");
    }

    #[test]
    fn zero_weights_give_half_activations() {
        let mut m = init_model(layout(3, 4, 2), 1);
        for i in 0..m.param_count() {
            m.set_param(i, 0.0);
        }
        let (hidden, output) = m.forward(&[0.3, -2.0, 14.0]).unwrap();
        assert!(hidden.iter().all(|&h| h == 0.5));
        assert!(output.iter().all(|&o| o == 0.5));
    }

    #[test]
    fn forward_matches_hand_evaluation() {
        // 1-1-1 net, W1 = [1, 0], W2 = [1, 0], x = 0:
        // hidden = sigmoid(0) = 0.5, output = sigmoid(0.5).
        let mut m = init_model(layout(1, 1, 1), 0);
        m.set_param(0, 1.0);
        m.set_param(1, 0.0);
        m.set_param(2, 1.0);
        m.set_param(3, 0.0);
        let (hidden, output) = m.forward(&[0.0]).unwrap();
        assert_eq!(hidden[0], 0.5);
        assert!((output[0] - 0.622459).abs() < 1e-6);
    }

    #[test]
    fn activations_stay_inside_unit_interval() {
        let m = init_model(layout(5, 7, 3), 42);
        let mut rng = XorShiftRng::new(1);
        for _ in 0..50 {
            let x: Vec<f64> = (0..5).map(|_| rng.next_f64() * 6.0 - 3.0).collect();
            let (hidden, output) = m.forward(&x).unwrap();
            for &a in hidden.iter().chain(&output) {
                assert!(a > 0.0 && a < 1.0);
            }
        }
    }

    #[test]
    fn forward_rejects_wrong_input_length() {
        let m = init_model(layout(4, 2, 2), 3);
        assert!(matches!(
            m.forward(&[1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 2
            })
        ));
    }

    #[test]
    fn null_update_leaves_model_unchanged() {
        // eta -> 0 is invalid per config, so emulate the null update with
        // alpha = 0 and a vanishing learning rate.
        let mut m = init_model(layout(3, 3, 2), 5);
        let before = m.clone();
        let cfg = TrainConfig {
            eta: 1e-300,
            alpha: 0.0,
            ..TrainConfig::default()
        };
        let sse = train_step(&mut m, &[0.1, 0.5, 0.9], 1, &cfg).unwrap();
        assert!(sse > 0.0);
        for i in 0..m.param_count() {
            assert!((m.param(i) - before.param(i)).abs() < 1e-290);
        }
    }

    #[test]
    fn momentum_follows_the_recurrence() {
        // Second applied delta must equal -eta*g2 + alpha*(first delta).
        let cfg = TrainConfig {
            eta: 0.8,
            alpha: 0.7,
            ..TrainConfig::default()
        };
        let x = [0.2, 0.9];
        let mut m = init_model(layout(2, 3, 2), 17);
        let w0: Vec<f64> = (0..m.param_count()).map(|i| m.param(i)).collect();

        train_step(&mut m, &x, 0, &cfg).unwrap();
        let w1: Vec<f64> = (0..m.param_count()).map(|i| m.param(i)).collect();

        // Raw gradient at the post-first-step weights.
        let targets = encode_targets(0, 2, &cfg);
        let (g1, g2, _) = m.gradients(&x, &targets).unwrap();
        let grads: Vec<f64> = g1.data.iter().chain(&g2.data).copied().collect();

        train_step(&mut m, &x, 0, &cfg).unwrap();
        for i in 0..m.param_count() {
            let first_delta = w1[i] - w0[i];
            let expected = -cfg.eta * grads[i] + cfg.alpha * first_delta;
            let actual = m.param(i) - w1[i];
            assert!(
                (actual - expected).abs() < 1e-12,
                "param {i}: {actual} vs {expected}"
            );
        }
    }

    fn xor_data() -> (Vec<Vec<f64>>, Vec<usize>) {
        (
            vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
            ],
            vec![0, 1, 1, 0],
        )
    }

    #[test]
    fn xor_task_trains_to_full_accuracy() {
        let (inputs, labels) = xor_data();
        let mut m = init_model(layout(2, 4, 2), 1);
        let cfg = TrainConfig {
            max_epochs: 5000,
            target_sse: 0.005,
            seed: 1,
            ..TrainConfig::default()
        };
        train(&mut m, &inputs, &labels, &cfg).unwrap();
        for (x, &label) in inputs.iter().zip(&labels) {
            assert_eq!(m.classify(x).unwrap(), label);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let (inputs, labels) = xor_data();
        let cfg = TrainConfig {
            max_epochs: 200,
            target_sse: 0.0,
            ..TrainConfig::default()
        };
        let mut a = init_model(layout(2, 4, 2), 9);
        let mut b = init_model(layout(2, 4, 2), 9);
        let ha = train(&mut a, &inputs, &labels, &cfg).unwrap();
        let hb = train(&mut b, &inputs, &labels, &cfg).unwrap();
        assert_eq!(a.w1, b.w1);
        assert_eq!(a.w2, b.w2);
        assert_eq!(ha.epoch_sse, hb.epoch_sse);
    }

    #[test]
    fn sse_decreases_on_separable_blobs() {
        let mut passes = 0;
        for seed in 0..10 {
            let mut rng = XorShiftRng::new(seed);
            let mut inputs = Vec::new();
            let mut labels = Vec::new();
            for i in 0..40 {
                let class = i % 2;
                let base = if class == 0 { 0.2 } else { 0.8 };
                inputs.push(vec![
                    base + 0.05 * rng.next_weight(),
                    base + 0.05 * rng.next_weight(),
                ]);
                labels.push(class);
            }
            let mut m = init_model(layout(2, 3, 2), seed);
            let cfg = TrainConfig {
                max_epochs: 50,
                target_sse: 0.0,
                seed,
                ..TrainConfig::default()
            };
            let h = train(&mut m, &inputs, &labels, &cfg).unwrap();
            if h.epoch_sse.last().unwrap() < h.epoch_sse.first().unwrap() {
                passes += 1;
            }
        }
        assert_eq!(passes, 10);
    }

    #[test]
    fn target_encoding_has_one_hot_entry() {
        let cfg = TrainConfig::default();
        let t = encode_targets(3, 10, &cfg);
        assert_eq!(t.iter().filter(|&&v| v == cfg.target_hi).count(), 1);
        assert_eq!(t.iter().filter(|&&v| v == cfg.target_lo).count(), 9);
        assert_eq!(t[3], cfg.target_hi);
    }

    #[test]
    fn classify_breaks_ties_toward_lowest_class() {
        let mut m = init_model(layout(2, 2, 3), 0);
        for i in 0..m.param_count() {
            m.set_param(i, 0.0);
        }
        // All outputs are exactly 0.5.
        assert_eq!(m.classify(&[0.4, 0.6]).unwrap(), 0);
    }

    #[test]
    fn classify_picks_the_forced_high_output() {
        // Zero everything, then drive output 1 high and the rest low
        // through the output biases alone.
        let mut m = init_model(layout(2, 2, 4), 0);
        for i in 0..m.param_count() {
            m.set_param(i, 0.0);
        }
        for (k, bias) in [-2.0, 2.0, -2.0, -2.0].into_iter().enumerate() {
            m.w2.set(k, 2, bias);
        }
        let (_, out) = m.forward(&[0.3, 0.8]).unwrap();
        assert!(out[1] > 0.8 && out[0] < 0.2);
        assert_eq!(m.classify(&[0.3, 0.8]).unwrap(), 1);
    }

    #[test]
    fn classify_agrees_with_forward_argmax() {
        let m = init_model(layout(6, 5, 4), 77);
        let mut rng = XorShiftRng::new(3);
        for _ in 0..30 {
            let x: Vec<f64> = (0..6).map(|_| rng.next_f64()).collect();
            let (_, out) = m.forward(&x).unwrap();
            let argmax = out
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(m.classify(&x).unwrap(), argmax);
        }
    }

    #[test]
    fn permuting_output_rows_permutes_decisions() {
        let m = init_model(layout(4, 5, 3), 31);
        let perm = [2usize, 0, 1];
        let mut permuted = m.clone();
        for (k, &src) in perm.iter().enumerate() {
            for j in 0..m.w2.cols() {
                permuted.w2.set(k, j, m.w2.get(src, j));
            }
        }
        let mut rng = XorShiftRng::new(4);
        for _ in 0..25 {
            let x: Vec<f64> = (0..4).map(|_| rng.next_f64()).collect();
            let original = m.classify(&x).unwrap();
            let moved = permuted.classify(&x).unwrap();
            assert_eq!(perm[moved], original);
        }
    }

    #[test]
    fn save_load_round_trips_weights_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.mlp");
        let m = init_model(layout(7, 6, 5), 1234);
        save_model(&m, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded.layout(), m.layout());
        assert_eq!(loaded.w1, m.w1);
        assert_eq!(loaded.w2, m.w2);
        assert!(loaded.v1.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.mlp");
        std::fs::write(&path, "MLP9\n1 1 1\n0 0\n0 0\n").unwrap();
        assert!(matches!(load_model(&path), Err(Error::ModelFormat { .. })));
    }

    #[test]
    fn non_finite_weights_in_file_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nan.mlp");
        std::fs::write(&path, "MLP1\n1 1 1\n0.5 NaN\n1 1\n").unwrap();
        assert!(matches!(load_model(&path), Err(Error::ModelFormat { .. })));
    }

    #[test]
    fn short_weight_row_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("short.mlp");
        std::fs::write(&path, "MLP1\n2 1 1\n0.5 0.5\n1 1\n").unwrap();
        assert!(matches!(load_model(&path), Err(Error::ModelFormat { .. })));
    }

    #[test]
    fn hand_written_model_file_evaluates_as_computed() {
        // 1-1-1 with W1 = [1.5, -0.25], W2 = [0.0, 2.0]:
        // hidden = sigmoid(1.5*1 - 0.25), output = sigmoid(0*hidden + 2.0).
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hand.mlp");
        std::fs::write(&path, "MLP1\n1 1 1\n1.5 -0.25\n0.0 2.0\n").unwrap();
        let m = load_model(&path).unwrap();
        let (hidden, output) = m.forward(&[1.0]).unwrap();
        let expect_hidden = 1.0 / (1.0 + (-1.25f64).exp());
        let expect_output = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((hidden[0] - expect_hidden).abs() < 1e-15);
        assert!((output[0] - expect_output).abs() < 1e-15);
    }

    #[test]
    fn train_rejects_empty_set_and_bad_labels() {
        let mut m = init_model(layout(2, 2, 2), 0);
        let cfg = TrainConfig::default();
        assert!(matches!(
            train(&mut m, &[], &[], &cfg),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(
            train(&mut m, &[vec![0.0, 0.0]], &[5], &cfg),
            Err(Error::InvalidLabel { label: 5, .. })
        ));
    }
}
