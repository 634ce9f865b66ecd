//! Pair-classifier network scoring whether two features share an identity.
//!
//! Architecture: `|f_i - f_j|` -> FC(D, 128) -> ReLU -> FC(128, 128) -> ReLU
//! -> FC(128, 2) -> softmax. Output `(x0, x1)` is (different, same); the
//! similarity score is `x1 - x0` with logits scaled by 0.1 at inference.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{check_dim, CameraId, FeatureVector, Frame, IdentityId};

pub const HIDDEN_WIDTH: usize = 128;
/// Logit scale applied before the softmax when scoring pairs.
pub const INFERENCE_TEMPERATURE: f64 = 0.1;

const MAGIC: &[u8; 4] = b"LAMN";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairLabel {
    Negative,
    Positive,
}

impl PairLabel {
    pub fn is_positive(self) -> bool {
        self == PairLabel::Positive
    }

    fn class(self) -> usize {
        match self {
            PairLabel::Negative => 0,
            PairLabel::Positive => 1,
        }
    }
}

/// Where a training pair came from; kept for auditing sampler constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairMeta {
    pub camera_a: CameraId,
    pub camera_b: CameraId,
    pub start_a: Frame,
    pub start_b: Frame,
    pub identity_a: IdentityId,
    pub identity_b: IdentityId,
    /// Positions of the two tracklets in the sampler's input.
    pub index_a: usize,
    pub index_b: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub diff: FeatureVector,
    pub label: PairLabel,
    pub meta: PairMeta,
}

impl PairSample {
    pub fn new(a: &FeatureVector, b: &FeatureVector, label: PairLabel, meta: PairMeta) -> Result<Self> {
        Ok(Self {
            diff: a.abs_diff(b)?,
            label,
            meta,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr_initial: f64,
    pub epochs_initial: usize,
    pub lr_decay_factor: f64,
    pub epochs_decay: usize,
    pub batch_size: usize,
    pub optimizer: Optimizer,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr_initial: 1e-4,
            epochs_initial: 30,
            lr_decay_factor: 0.1,
            epochs_decay: 10,
            batch_size: 64,
            optimizer: Optimizer::Adam,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr_initial > 0.0 && self.lr_decay_factor > 0.0) {
            return Err(Error::InvalidConfig("learning rates must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be at least 1".into()));
        }
        if self.epochs_initial + self.epochs_decay == 0 {
            return Err(Error::InvalidConfig("at least one epoch is required".into()));
        }
        Ok(())
    }

    fn lr_for_epoch(&self, epoch: usize) -> f64 {
        if epoch < self.epochs_initial {
            self.lr_initial
        } else {
            self.lr_initial * self.lr_decay_factor
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean cross-entropy over the samples seen in each epoch.
    pub epoch_losses: Vec<f64>,
    /// Fraction of training pairs classified correctly after the last epoch.
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Dense {
    // (in, out), so a batch maps as `x.dot(w) + b`.
    weights: Array2<f64>,
    bias: Array1<f64>,
}

impl Dense {
    fn zeros(input: usize, output: usize) -> Self {
        Self {
            weights: Array2::zeros((input, output)),
            bias: Array1::zeros(output),
        }
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricNetwork {
    input_dim: usize,
    seed: u64,
    layers: Vec<Dense>,
}

struct Activations {
    hidden1: Array2<f64>,
    hidden2: Array2<f64>,
    logits: Array2<f64>,
}

impl MetricNetwork {
    /// Weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, biases zero.
    pub fn init(input_dim: usize, seed: u64) -> Result<Self> {
        let mut net = Self::zeros(input_dim)?;
        net.seed = seed;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut net.layers {
            let bound = 1.0 / (layer.weights.nrows() as f64).sqrt();
            layer
                .weights
                .iter_mut()
                .for_each(|w| *w = rng.random_range(-bound..=bound));
        }
        Ok(net)
    }

    /// All parameters zero; outputs (0.5, 0.5) for every input.
    pub fn zeros(input_dim: usize) -> Result<Self> {
        if input_dim < 1 {
            return Err(Error::InvalidNetwork("input dimension must be at least 1".into()));
        }
        Ok(Self {
            input_dim,
            seed: 0,
            layers: vec![
                Dense::zeros(input_dim, HIDDEN_WIDTH),
                Dense::zeros(HIDDEN_WIDTH, HIDDEN_WIDTH),
                Dense::zeros(HIDDEN_WIDTH, 2),
            ],
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `(inputs, outputs)` of each layer.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        self.layers.iter().map(|l| l.weights.dim()).collect()
    }

    fn activations(&self, x: ArrayView2<f64>) -> Activations {
        let relu = |v: f64| v.max(0.0);
        let mut hidden1 = x.dot(&self.layers[0].weights) + &self.layers[0].bias;
        hidden1.mapv_inplace(relu);
        let mut hidden2 = hidden1.dot(&self.layers[1].weights) + &self.layers[1].bias;
        hidden2.mapv_inplace(relu);
        let logits = hidden2.dot(&self.layers[2].weights) + &self.layers[2].bias;
        Activations {
            hidden1,
            hidden2,
            logits,
        }
    }

    /// Raw logits `(z0, z1)` for one input.
    pub fn logits(&self, diff: &FeatureVector) -> Result<(f64, f64)> {
        check_dim(self.input_dim, diff.dim())?;
        let x = ArrayView2::from_shape((1, self.input_dim), diff.as_slice()).expect("shape checked");
        let z = self.activations(x).logits;
        Ok((z[[0, 0]], z[[0, 1]]))
    }

    /// Softmax of `temperature * logits`.
    pub fn forward(&self, diff: &FeatureVector, temperature: f64) -> Result<(f64, f64)> {
        if !(temperature > 0.0) {
            return Err(Error::InvalidConfig("temperature must be positive".into()));
        }
        let (z0, z1) = self.logits(diff)?;
        Ok(softmax2(temperature * z0, temperature * z1))
    }

    /// `x1 - x0` for `|f_i - f_j|` at the inference temperature.
    pub fn similarity(&self, f_i: &FeatureVector, f_j: &FeatureVector) -> Result<f64> {
        let (x0, x1) = self.forward(&f_i.abs_diff(f_j)?, INFERENCE_TEMPERATURE)?;
        Ok(x1 - x0)
    }

    /// Batched [`MetricNetwork::similarity`].
    pub fn similarity_batch(&self, pairs: &[(&FeatureVector, &FeatureVector)]) -> Result<Vec<f64>> {
        let mut x = Array2::zeros((pairs.len(), self.input_dim));
        for (row, (a, b)) in x.rows_mut().into_iter().zip(pairs) {
            check_dim(self.input_dim, a.dim())?;
            check_dim(self.input_dim, b.dim())?;
            for ((dst, p), q) in row.into_iter().zip(a.as_slice()).zip(b.as_slice()) {
                *dst = (p - q).abs();
            }
        }
        let z = self.activations(x.view()).logits;
        Ok(z.rows()
            .into_iter()
            .map(|r| {
                let (x0, x1) = softmax2(INFERENCE_TEMPERATURE * r[0], INFERENCE_TEMPERATURE * r[1]);
                x1 - x0
            })
            .collect())
    }

    fn check_samples(&self, data: &[PairSample]) -> Result<()> {
        for s in data {
            check_dim(self.input_dim, s.diff.dim())?;
        }
        Ok(())
    }

    fn design_matrix(&self, data: &[PairSample]) -> (Array2<f64>, Vec<usize>) {
        let mut x = Array2::zeros((data.len(), self.input_dim));
        for (mut row, s) in x.rows_mut().into_iter().zip(data) {
            row.assign(&ndarray::aview1(s.diff.as_slice()));
        }
        (x, data.iter().map(|s| s.label.class()).collect())
    }

    /// Mean cross-entropy (temperature 1) and its gradient per layer.
    fn loss_and_grad(&self, x: ArrayView2<f64>, classes: &[usize]) -> (f64, Vec<Dense>) {
        let batch = x.nrows() as f64;
        let act = self.activations(x);
        let mut dz = Array2::zeros(act.logits.dim());
        let mut loss = 0.0;
        for (i, &c) in classes.iter().enumerate() {
            let (z0, z1) = (act.logits[[i, 0]], act.logits[[i, 1]]);
            let m = z0.max(z1);
            let lse = m + ((z0 - m).exp() + (z1 - m).exp()).ln();
            let zc = if c == 0 { z0 } else { z1 };
            loss += lse - zc;
            let (p0, p1) = softmax2(z0, z1);
            dz[[i, 0]] = (p0 - if c == 0 { 1.0 } else { 0.0 }) / batch;
            dz[[i, 1]] = (p1 - if c == 1 { 1.0 } else { 0.0 }) / batch;
        }

        let g3 = Dense {
            weights: act.hidden2.t().dot(&dz),
            bias: dz.sum_axis(Axis(0)),
        };
        let mut dh2 = dz.dot(&self.layers[2].weights.t());
        dh2.zip_mut_with(&act.hidden2, |g, &h| {
            if h <= 0.0 {
                *g = 0.0
            }
        });
        let g2 = Dense {
            weights: act.hidden1.t().dot(&dh2),
            bias: dh2.sum_axis(Axis(0)),
        };
        let mut dh1 = dh2.dot(&self.layers[1].weights.t());
        dh1.zip_mut_with(&act.hidden1, |g, &h| {
            if h <= 0.0 {
                *g = 0.0
            }
        });
        let g1 = Dense {
            weights: x.t().dot(&dh1),
            bias: dh1.sum_axis(Axis(0)),
        };
        (loss / batch, vec![g1, g2, g3])
    }

    /// Mean loss and the flattened gradient (layer by layer, weights row-major
    /// then biases), in the same order as [`MetricNetwork::parameters`].
    pub fn loss_and_gradient(&self, data: &[PairSample]) -> Result<(f64, Vec<f64>)> {
        if data.is_empty() {
            return Err(Error::EmptyTrainingData);
        }
        self.check_samples(data)?;
        let (x, classes) = self.design_matrix(data);
        let (loss, grads) = self.loss_and_grad(x.view(), &classes);
        Ok((loss, flatten(&grads)))
    }

    /// Mean cross-entropy at temperature 1.
    pub fn loss(&self, data: &[PairSample]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::EmptyTrainingData);
        }
        self.check_samples(data)?;
        let (x, classes) = self.design_matrix(data);
        let z = self.activations(x.view()).logits;
        let total: f64 = z
            .rows()
            .into_iter()
            .zip(&classes)
            .map(|(r, &c)| {
                let m = r[0].max(r[1]);
                let lse = m + ((r[0] - m).exp() + (r[1] - m).exp()).ln();
                lse - r[c]
            })
            .sum();
        Ok(total / data.len() as f64)
    }

    pub fn parameters(&self) -> Vec<f64> {
        flatten(&self.layers)
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        let total: usize = self.layers.iter().map(Dense::param_count).sum();
        check_dim(total, params.len())?;
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidNetwork("non-finite parameter".into()));
        }
        let mut it = params.iter().copied();
        for layer in &mut self.layers {
            layer.weights.iter_mut().for_each(|w| *w = it.next().unwrap());
            layer.bias.iter_mut().for_each(|b| *b = it.next().unwrap());
        }
        Ok(())
    }

    /// Fraction of samples whose predicted class matches the label.
    pub fn accuracy(&self, data: &[PairSample]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::EmptyTrainingData);
        }
        self.check_samples(data)?;
        let (x, classes) = self.design_matrix(data);
        let z = self.activations(x.view()).logits;
        let correct = z
            .rows()
            .into_iter()
            .zip(&classes)
            .filter(|(r, &c)| usize::from(r[1] > r[0]) == c)
            .count();
        Ok(correct as f64 / data.len() as f64)
    }

    /// Mini-batch training on cross-entropy. Deterministic for a fixed
    /// `cfg.seed`: the same seed drives the per-epoch shuffles.
    pub fn train(&mut self, data: &[PairSample], cfg: &TrainConfig) -> Result<TrainReport> {
        if data.is_empty() {
            return Err(Error::EmptyTrainingData);
        }
        cfg.validate()?;
        self.check_samples(data)?;
        let (x, classes) = self.design_matrix(data);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut opt = OptimizerState::new(cfg.optimizer, &self.layers);
        let mut epoch_losses = Vec::with_capacity(cfg.epochs_initial + cfg.epochs_decay);
        let mut batch_x = Array2::zeros((cfg.batch_size.min(data.len()), self.input_dim));

        for epoch in 0..cfg.epochs_initial + cfg.epochs_decay {
            let lr = cfg.lr_for_epoch(epoch);
            order.shuffle(&mut rng);
            let mut loss_sum = 0.0;
            for chunk in order.chunks(cfg.batch_size) {
                if batch_x.nrows() != chunk.len() {
                    batch_x = Array2::zeros((chunk.len(), self.input_dim));
                }
                for (mut row, &i) in batch_x.rows_mut().into_iter().zip(chunk) {
                    row.assign(&x.row(i));
                }
                let batch_classes: Vec<usize> = chunk.iter().map(|&i| classes[i]).collect();
                let (loss, grads) = self.loss_and_grad(batch_x.view(), &batch_classes);
                loss_sum += loss * chunk.len() as f64;
                opt.step(&mut self.layers, &grads, lr);
            }
            epoch_losses.push(loss_sum / data.len() as f64);
        }
        if self.layers.iter().any(|l| l.weights.iter().chain(l.bias.iter()).any(|v| !v.is_finite())) {
            return Err(Error::InvalidNetwork("training diverged".into()));
        }
        Ok(TrainReport {
            epoch_losses,
            train_accuracy: self.accuracy(data)?,
        })
    }

    /// Versioned little-endian encoding: magic, version, input dim, layer
    /// count, `(in, out)` per layer, then each layer's weights (row-major)
    /// followed by its biases as `f64`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.input_dim as u32).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.layers.len() as u32).to_le_bytes());
        for (i, o) in self.layer_shapes() {
            out.extend_from_slice(&(i as u32).to_le_bytes());
            out.extend_from_slice(&(o as u32).to_le_bytes());
        }
        for p in self.parameters() {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::InvalidNetwork("bad magic".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::InvalidNetwork(format!("unsupported version {version}")));
        }
        let input_dim = r.u32()? as usize;
        let seed = r.u64()?;
        let mut net = Self::zeros(input_dim)?;
        net.seed = seed;
        let layer_count = r.u32()? as usize;
        let mut shapes = Vec::with_capacity(layer_count);
        for _ in 0..layer_count {
            shapes.push((r.u32()? as usize, r.u32()? as usize));
        }
        if shapes != net.layer_shapes() {
            return Err(Error::InvalidNetwork(format!("unexpected layer shapes {shapes:?}")));
        }
        let total: usize = net.layers.iter().map(Dense::param_count).sum();
        let params = (0..total).map(|_| r.f64()).collect::<Result<Vec<f64>>>()?;
        if r.pos != bytes.len() {
            return Err(Error::InvalidNetwork("trailing bytes".into()));
        }
        net.set_parameters(&params)?;
        Ok(net)
    }
}

fn softmax2(a: f64, b: f64) -> (f64, f64) {
    let m = a.max(b);
    let (ea, eb) = ((a - m).exp(), (b - m).exp());
    let s = ea + eb;
    (ea / s, eb / s)
}

fn flatten(layers: &[Dense]) -> Vec<f64> {
    layers
        .iter()
        .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
        .collect()
}

enum OptimizerState {
    Sgd,
    Adam {
        first: Vec<Dense>,
        second: Vec<Dense>,
        step: i32,
    },
}

impl OptimizerState {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(kind: Optimizer, layers: &[Dense]) -> Self {
        match kind {
            Optimizer::Sgd => Self::Sgd,
            Optimizer::Adam => {
                let zeros: Vec<Dense> = layers
                    .iter()
                    .map(|l| Dense::zeros(l.weights.nrows(), l.weights.ncols()))
                    .collect();
                Self::Adam {
                    first: zeros.clone(),
                    second: zeros,
                    step: 0,
                }
            }
        }
    }

    fn step(&mut self, layers: &mut [Dense], grads: &[Dense], lr: f64) {
        match self {
            Self::Sgd => {
                for (l, g) in layers.iter_mut().zip(grads) {
                    l.weights.scaled_add(-lr, &g.weights);
                    l.bias.scaled_add(-lr, &g.bias);
                }
            }
            Self::Adam { first, second, step } => {
                *step += 1;
                let c1 = 1.0 - Self::BETA1.powi(*step);
                let c2 = 1.0 - Self::BETA2.powi(*step);
                let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
                    *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
                    *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
                    *p -= lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
                };
                for (((l, g), m), v) in layers.iter_mut().zip(grads).zip(first.iter_mut()).zip(second.iter_mut()) {
                    ndarray::Zip::from(&mut l.weights)
                        .and(&mut m.weights)
                        .and(&mut v.weights)
                        .and(&g.weights)
                        .for_each(|p, m, v, &g| update(p, m, v, g));
                    ndarray::Zip::from(&mut l.bias)
                        .and(&mut m.bias)
                        .and(&mut v.bias)
                        .and(&g.bias)
                        .for_each(|p, m, v, &g| update(p, m, v, g));
                }
            }
        }
    }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::InvalidNetwork("truncated parameter file".into()))?;
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use proptest::prelude::*;

    fn fv(v: Vec<f64>) -> FeatureVector {
        FeatureVector::new(v).unwrap()
    }

    /// Positives have diffs near zero, negatives near the all-ones vector.
    pub(crate) fn separable(n: usize, dim: usize, seed: u64) -> Vec<PairSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let positive = i % 2 == 0;
                let center = if positive { 0.0 } else { 1.0 };
                let diff: Vec<f64> = (0..dim)
                    .map(|_| (center + rng.random_range(-0.2..0.2f64)).abs())
                    .collect();
                PairSample {
                    diff: fv(diff),
                    label: if positive { PairLabel::Positive } else { PairLabel::Negative },
                    meta: PairMeta::default(),
                }
            })
            .collect()
    }

    #[test]
    fn init_shapes_and_determinism() {
        let a = MetricNetwork::init(4, 7).unwrap();
        let b = MetricNetwork::init(4, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.layer_shapes(), vec![(4, 128), (128, 128), (128, 2)]);
        assert_ne!(a, MetricNetwork::init(4, 8).unwrap());
        assert!(MetricNetwork::init(0, 1).is_err());
    }

    #[test]
    fn zero_network_is_neutral() {
        let net = MetricNetwork::zeros(3).unwrap();
        assert_eq!(net.forward(&fv(vec![1.0, 2.0, 3.0]), 1.0).unwrap(), (0.5, 0.5));
        assert_eq!(net.similarity(&fv(vec![1.0, 0.0, 0.0]), &fv(vec![0.0, 4.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn forward_applies_temperature_to_logits() {
        let net = MetricNetwork::init(3, 3).unwrap();
        let x = fv(vec![0.3, 0.9, 0.1]);
        let (z0, z1) = net.logits(&x).unwrap();
        for t in [0.1, 1.0, 2.5] {
            let (x0, x1) = net.forward(&x, t).unwrap();
            let e0 = (t * z0).exp();
            let e1 = (t * z1).exp();
            assert!((x0 - e0 / (e0 + e1)).abs() < 1e-12);
            assert!((x0 + x1 - 1.0).abs() < 1e-12);
        }
        assert!(net.forward(&x, 0.0).is_err());
        assert!(net.forward(&fv(vec![1.0]), 1.0).is_err());
    }

    #[test]
    fn batch_similarity_matches_single() {
        let net = MetricNetwork::init(4, 2).unwrap();
        let a = fv(vec![0.1, 0.2, 0.3, 0.4]);
        let b = fv(vec![1.0, -0.2, 0.0, 2.0]);
        let batch = net.similarity_batch(&[(&a, &b), (&b, &a)]).unwrap();
        let single = net.similarity(&a, &b).unwrap();
        assert!((batch[0] - single).abs() < 1e-12);
        assert!((batch[1] - single).abs() < 1e-12);
    }

    #[test]
    fn training_is_deterministic() {
        let data = separable(128, 4, 1);
        let cfg = TrainConfig {
            epochs_initial: 3,
            epochs_decay: 1,
            seed: 42,
            ..TrainConfig::default()
        };
        let mut a = MetricNetwork::init(4, 9).unwrap();
        let mut b = MetricNetwork::init(4, 9).unwrap();
        let ra = a.train(&data, &cfg).unwrap();
        let rb = b.train(&data, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        assert_eq!(ra.epoch_losses.len(), 4);
    }

    #[test]
    fn empty_data_rejected() {
        let mut net = MetricNetwork::init(2, 0).unwrap();
        assert_eq!(net.train(&[], &TrainConfig::default()), Err(Error::EmptyTrainingData));
    }

    #[test]
    fn bytes_round_trip_and_reject_corruption() {
        let net = MetricNetwork::init(5, 11).unwrap();
        let bytes = net.to_bytes();
        assert_eq!(MetricNetwork::from_bytes(&bytes).unwrap(), net);
        assert!(MetricNetwork::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(MetricNetwork::from_bytes(&bad).is_err());
    }

    proptest! {
        #[test]
        fn similarity_symmetric_and_bounded(
            a in proptest::collection::vec(-3.0f64..3.0, 4),
            b in proptest::collection::vec(-3.0f64..3.0, 4),
            seed in 0u64..20,
        ) {
            let net = MetricNetwork::init(4, seed).unwrap();
            let (a, b) = (fv(a), fv(b));
            let w = net.similarity(&a, &b).unwrap();
            prop_assert_eq!(w, net.similarity(&b, &a).unwrap());
            prop_assert!(w > -1.0 && w < 1.0);
            let (x0, x1) = net.forward(&a.abs_diff(&b).unwrap(), 1.0).unwrap();
            prop_assert!((x0 + x1 - 1.0).abs() < 1e-12);
            // Temperature never flips the sign of x1 - x0.
            prop_assert_eq!((x1 - x0) > 0.0, w > 0.0);
        }
    }
}
