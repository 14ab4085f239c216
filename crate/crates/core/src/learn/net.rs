//! Fully connected ReLU networks with a softmax output, trained by Adam.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::features::Row;
use crate::error::{Error, Result};
use crate::rng::{seeded_rng, Tag};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    /// 1 = softmax regression, 2 = one hidden layer of `hidden` units,
    /// 3 = hidden layers of `hidden` and `hidden / 2` units.
    pub layers: u8,
    pub hidden: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// May be fractional.
    pub epochs: f64,
    pub seed: u64,
    /// Test-set evaluations per epoch.
    pub evals_per_epoch: usize,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            layers: 1,
            hidden: 200,
            learning_rate: 0.001,
            batch_size: 32,
            epochs: 1.0,
            seed: 0,
            evals_per_epoch: 50,
        }
    }
}

impl NetConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.layers) {
            return Err(Error::InvalidConfig(format!(
                "layers must be 1, 2 or 3, got {}",
                self.layers
            )));
        }
        if self.layers > 1 && self.hidden < 2 {
            return Err(Error::InvalidConfig("hidden must be at least 2".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be positive".into()));
        }
        if !(self.epochs >= 0.0 && self.epochs.is_finite()) {
            return Err(Error::InvalidConfig("epochs must be a nonnegative number".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be positive".into()));
        }
        if self.evals_per_epoch == 0 {
            return Err(Error::InvalidConfig("evals_per_epoch must be positive".into()));
        }
        Ok(())
    }

    /// Layer widths from input to output.
    pub fn widths(&self, inputs: usize, classes: usize) -> Vec<usize> {
        match self.layers {
            1 => vec![inputs, classes],
            2 => vec![inputs, self.hidden, classes],
            _ => vec![inputs, self.hidden, self.hidden / 2, classes],
        }
    }
}

/// Weights are stored input-major: row `i` holds the `n_out` outgoing
/// weights of input unit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub n_in: usize,
    pub n_out: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Layer {
    fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            w: vec![0.0; n_in * n_out],
            b: vec![0.0; n_out],
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.n_out..(i + 1) * self.n_out]
    }

    /// `b + Σ_i x_i W[i]`, summed in ascending input order.
    pub fn forward_row(&self, x: &Row, out: &mut [f64]) {
        out.copy_from_slice(&self.b);
        match x {
            Row::Binary(pos) => {
                for &i in pos {
                    add_assign(out, self.row(i));
                }
            }
            Row::Sparse(idx, val) => {
                for (&i, &v) in idx.iter().zip(val) {
                    axpy(out, v, self.row(i));
                }
            }
        }
    }

    fn forward_dense(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.b);
        for (i, &v) in x.iter().enumerate() {
            if v != 0.0 {
                axpy(out, v, self.row(i));
            }
        }
    }
}

#[inline]
fn add_assign(acc: &mut [f64], x: &[f64]) {
    acc.iter_mut().zip(x).for_each(|(a, &b)| *a += b);
}

#[inline]
fn axpy(acc: &mut [f64], s: f64, x: &[f64]) {
    acc.iter_mut().zip(x).for_each(|(a, &b)| *a += s * b);
}

/// First-layer pre-activation for a one-hot block input: the bias plus the
/// sum of the selected weight rows, with no multiplications.
pub fn sparse_binary_forward(positions: &[usize], layer: &Layer) -> Result<Vec<f64>> {
    if let Some(&bad) = positions.iter().find(|&&p| p >= layer.n_in) {
        return Err(Error::CorruptInput(format!(
            "position {bad} outside input width {}",
            layer.n_in
        )));
    }
    let mut out = vec![0.0; layer.n_out];
    layer.forward_row(&Row::Binary(positions.to_vec()), &mut out);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
struct Adam {
    step: u64,
    m: Vec<Layer>,
    v: Vec<Layer>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    config: NetConfig,
    layers: Vec<Layer>,
    adam: Adam,
}

/// Per-sample forward state kept for backpropagation.
struct Trace {
    /// Pre-activations of every layer; the last entry is the logits.
    pre: Vec<Vec<f64>>,
}

impl Model {
    /// Fan-in scaled uniform weights `U(-1/√n_in, 1/√n_in)`, zero biases.
    pub fn new(config: &NetConfig, inputs: usize, classes: usize) -> Result<Self> {
        config.validate()?;
        if inputs == 0 || classes == 0 {
            return Err(Error::InvalidConfig("need at least one input and one class".into()));
        }
        let widths = config.widths(inputs, classes);
        let layers: Vec<Layer> = widths
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                let mut layer = Layer::zeros(w[0], w[1]);
                let bound = 1.0 / (w[0] as f64).sqrt();
                let mut rng = seeded_rng(config.seed, Tag::WeightInit, l as u64);
                layer
                    .w
                    .iter_mut()
                    .for_each(|x| *x = rng.random_range(-bound..bound));
                layer
            })
            .collect();
        Ok(Self::from_layers(config.clone(), layers))
    }

    pub(crate) fn from_layers(config: NetConfig, layers: Vec<Layer>) -> Self {
        let zeros: Vec<Layer> = layers.iter().map(|l| Layer::zeros(l.n_in, l.n_out)).collect();
        Self {
            config,
            adam: Adam {
                step: 0,
                m: zeros.clone(),
                v: zeros,
            },
            layers,
        }
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn classes(&self) -> usize {
        self.layers.last().expect("at least one layer").n_out
    }

    pub fn steps_taken(&self) -> u64 {
        self.adam.step
    }

    fn trace(&self, x: &Row) -> Trace {
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut z = vec![0.0; self.layers[0].n_out];
        self.layers[0].forward_row(x, &mut z);
        pre.push(z);
        for layer in &self.layers[1..] {
            let a: Vec<f64> = pre.last().unwrap().iter().map(|&v| v.max(0.0)).collect();
            let mut z = vec![0.0; layer.n_out];
            layer.forward_dense(&a, &mut z);
            pre.push(z);
        }
        Trace { pre }
    }

    pub fn logits(&self, x: &Row) -> Vec<f64> {
        self.trace(x).pre.pop().unwrap()
    }

    /// Post-ReLU activations of the last hidden layer, or `None` for a
    /// network without hidden layers.
    pub fn embedding(&self, x: &Row) -> Option<Vec<f64>> {
        if self.layers.len() < 2 {
            return None;
        }
        let t = self.trace(x);
        Some(t.pre[t.pre.len() - 2].iter().map(|&v| v.max(0.0)).collect())
    }

    pub fn predict(&self, x: &Row) -> usize {
        argmax(&self.logits(x))
    }

    pub fn accuracy(&self, rows: &[Row], labels: &[usize]) -> f64 {
        if rows.is_empty() {
            return 0.0;
        }
        let hits = rows
            .iter()
            .zip(labels)
            .filter(|(x, &y)| self.predict(x) == y)
            .count();
        hits as f64 / rows.len() as f64
    }

    /// Mean softmax cross-entropy over a batch.
    pub fn loss(&self, batch: &[(&Row, usize)]) -> f64 {
        let total: f64 = batch
            .iter()
            .map(|&(x, y)| cross_entropy(&self.logits(x), y).0)
            .sum();
        total / batch.len() as f64
    }

    /// Mean loss and its gradient, laid out like the layers.
    pub fn loss_and_grad(&self, batch: &[(&Row, usize)]) -> (f64, Vec<Layer>) {
        let mut grads: Vec<Layer> = self.layers.iter().map(|l| Layer::zeros(l.n_in, l.n_out)).collect();
        let mut total = 0.0;
        let scale = 1.0 / batch.len() as f64;
        for &(x, y) in batch {
            let trace = self.trace(x);
            let (loss, mut delta) = cross_entropy(trace.pre.last().unwrap(), y);
            total += loss;
            delta.iter_mut().for_each(|d| *d *= scale);
            for l in (1..self.layers.len()).rev() {
                let layer = &self.layers[l];
                let below = &trace.pre[l - 1];
                let g = &mut grads[l];
                add_assign(&mut g.b, &delta);
                let mut next = vec![0.0; layer.n_in];
                for (i, &z) in below.iter().enumerate() {
                    if z > 0.0 {
                        axpy(&mut g.w[i * layer.n_out..(i + 1) * layer.n_out], z, &delta);
                        next[i] = layer
                            .row(i)
                            .iter()
                            .zip(&delta)
                            .map(|(w, d)| w * d)
                            .sum();
                    }
                }
                delta = next;
            }
            let g = &mut grads[0];
            let n_out = g.n_out;
            add_assign(&mut g.b, &delta);
            match x {
                Row::Binary(pos) => {
                    for &i in pos {
                        add_assign(&mut g.w[i * n_out..(i + 1) * n_out], &delta);
                    }
                }
                Row::Sparse(idx, val) => {
                    for (&i, &v) in idx.iter().zip(val) {
                        axpy(&mut g.w[i * n_out..(i + 1) * n_out], v, &delta);
                    }
                }
            }
        }
        (total * scale, grads)
    }

    /// One Adam step on a minibatch; returns the batch loss before the step.
    pub fn step(&mut self, batch: &[(&Row, usize)]) -> f64 {
        let (loss, grads) = self.loss_and_grad(batch);
        let lr = self.config.learning_rate;
        self.adam.step += 1;
        let t = self.adam.step as i32;
        let c1 = 1.0 - ADAM_BETA1.powi(t);
        let c2 = 1.0 - ADAM_BETA2.powi(t);
        for (l, g) in grads.iter().enumerate() {
            let (layer, m, v) = (&mut self.layers[l], &mut self.adam.m[l], &mut self.adam.v[l]);
            adam_update(&mut layer.w, &mut m.w, &mut v.w, &g.w, lr, c1, c2);
            adam_update(&mut layer.b, &mut m.b, &mut v.b, &g.b, lr, c1, c2);
        }
        loss
    }

    /// All parameters flattened layer by layer (weights, then biases).
    pub fn flat_params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.w.iter().chain(&l.b).copied())
            .collect()
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        let mut it = params.iter().copied();
        for l in &mut self.layers {
            l.w.iter_mut().chain(l.b.iter_mut()).for_each(|p| *p = it.next().expect("enough params"));
        }
        assert!(it.next().is_none(), "too many params");
    }

    pub fn all_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.w.iter().chain(&l.b).all(|p| p.is_finite()))
    }
}

pub fn flatten_grads(grads: &[Layer]) -> Vec<f64> {
    grads
        .iter()
        .flat_map(|l| l.w.iter().chain(&l.b).copied())
        .collect()
}

fn adam_update(p: &mut [f64], m: &mut [f64], v: &mut [f64], g: &[f64], lr: f64, c1: f64, c2: f64) {
    for i in 0..p.len() {
        m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g[i];
        v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g[i] * g[i];
        let mhat = m[i] / c1;
        let vhat = v[i] / c2;
        p[i] -= lr * mhat / (vhat.sqrt() + ADAM_EPS);
    }
}

/// Loss `-log softmax(z)_y` and its gradient `softmax(z) - e_y`.
fn cross_entropy(logits: &[f64], y: usize) -> (f64, Vec<f64>) {
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - top).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let loss = sum.ln() - (logits[y] - top);
    let mut grad: Vec<f64> = exps.iter().map(|e| e / sum).collect();
    grad[y] -= 1.0;
    (loss, grad)
}

/// Index of the largest value; ties go to the smaller index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
