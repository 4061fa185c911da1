use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Softmax,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    /// `out × in`
    pub weights: DMatrix<f64>,
    pub biases: DVector<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: DMatrix<f64>, biases: DVector<f64>, activation: Activation) -> Result<Self> {
        if weights.nrows() != biases.len() || weights.nrows() == 0 || weights.ncols() == 0 {
            return Err(Error::Shape(format!(
                "layer weights {}x{} do not match {} biases",
                weights.nrows(),
                weights.ncols(),
                biases.len()
            )));
        }
        if weights.iter().chain(biases.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Input("layer parameters must be finite".into()));
        }
        Ok(Self {
            weights,
            biases,
            activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub n_classes: usize,
}

impl Default for NetworkSpec {
    /// 4 inputs, hidden ReLU layers of 64, 32 and 16, two softmax outputs.
    fn default() -> Self {
        Self {
            input_dim: 4,
            hidden: vec![64, 32, 16],
            n_classes: 2,
        }
    }
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.input_dim < 1 || self.hidden.iter().any(|&h| h < 1) {
            return Err(Error::Config(format!("network dimensions must be >= 1: {self:?}")));
        }
        if self.n_classes < 2 {
            return Err(Error::Config(format!("need at least 2 classes, got {}", self.n_classes)));
        }
        Ok(())
    }
}

/// A feed-forward stack whose last layer is softmax.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<DenseLayer>,
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        let Some(last) = layers.last() else {
            return Err(Error::Shape("network needs at least one layer".into()));
        };
        if last.activation != Activation::Softmax {
            return Err(Error::Config("the output layer must use softmax".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].activation == Activation::Softmax {
                return Err(Error::Config(format!("softmax is only allowed on the output layer (layer {i})")));
            }
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::Shape(format!(
                    "layer {i} outputs {} values but layer {} expects {}",
                    pair[0].output_dim(),
                    i + 1,
                    pair[1].input_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn n_classes(&self) -> usize {
        self.layers.last().map_or(0, DenseLayer::output_dim)
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(DenseLayer::n_params).sum()
    }

    /// Per layer: weights row-major, then biases.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            push_row_major(&mut out, &l.weights);
            out.extend(l.biases.iter());
        }
        out
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::Shape(format!(
                "expected {} network parameters, got {}",
                self.n_params(),
                flat.len()
            )));
        }
        let mut it = flat.iter().copied();
        for l in &mut self.layers {
            for r in 0..l.weights.nrows() {
                for c in 0..l.weights.ncols() {
                    l.weights[(r, c)] = it.next().unwrap_or_default();
                }
            }
            for b in l.biases.iter_mut() {
                *b = it.next().unwrap_or_default();
            }
        }
        Ok(())
    }
}

fn push_row_major(out: &mut Vec<f64>, m: &DMatrix<f64>) {
    for r in 0..m.nrows() {
        out.extend(m.row(r).iter());
    }
}

/// Glorot-uniform weights, zero biases, ReLU hidden layers and a softmax head.
pub fn init_network(spec: &NetworkSpec, seed: u64) -> Result<Network> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<usize> = std::iter::once(spec.input_dim)
        .chain(spec.hidden.iter().copied())
        .chain(std::iter::once(spec.n_classes))
        .collect();
    let mut layers = Vec::with_capacity(dims.len() - 1);
    for (i, w) in dims.windows(2).enumerate() {
        let (fan_in, fan_out) = (w[0], w[1]);
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        // Drawn in row-major order so the stream matches the flat layout.
        let mut weights = DMatrix::zeros(fan_out, fan_in);
        for r in 0..fan_out {
            for c in 0..fan_in {
                weights[(r, c)] = rng.random_range(-limit..=limit);
            }
        }
        let activation = if i + 2 == dims.len() {
            Activation::Softmax
        } else {
            Activation::Relu
        };
        layers.push(DenseLayer::new(weights, DVector::zeros(fan_out), activation)?);
    }
    Network::new(layers)
}

/// Intermediate values kept from a forward pass for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input to each layer.
    inputs: Vec<DVector<f64>>,
    /// `W a + b` of each layer, before the activation.
    pre_activations: Vec<DVector<f64>>,
    probabilities: DVector<f64>,
}

impl ForwardCache {
    pub fn probabilities(&self) -> &[f64] {
        self.probabilities.as_slice()
    }

    pub fn pre_activations(&self) -> &[DVector<f64>] {
        &self.pre_activations
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn forward_network(net: &Network, input: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
    if input.len() != net.input_dim() {
        return Err(Error::Shape(format!(
            "network expects {} inputs, got {}",
            net.input_dim(),
            input.len()
        )));
    }
    let mut a = DVector::from_column_slice(input);
    let mut inputs = Vec::with_capacity(net.layers.len());
    let mut pre = Vec::with_capacity(net.layers.len());
    for layer in &net.layers {
        let z = &layer.weights * &a + &layer.biases;
        let out = match layer.activation {
            Activation::Relu => z.map(|v| v.max(0.0)),
            Activation::None => z.clone(),
            Activation::Softmax => DVector::from_vec(softmax(z.as_slice())),
        };
        inputs.push(a);
        pre.push(z);
        a = out;
    }
    let probs = a.as_slice().to_vec();
    Ok((
        probs,
        ForwardCache {
            inputs,
            pre_activations: pre,
            probabilities: a,
        },
    ))
}

/// `−ln max(p_label, 1e-12)`
pub fn cross_entropy(probabilities: &[f64], label: usize) -> Result<f64> {
    let p = probabilities.get(label).ok_or_else(|| {
        Error::Input(format!("label {label} out of range for {} classes", probabilities.len()))
    })?;
    Ok(-p.max(1e-12).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: DMatrix<f64>,
    pub biases: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGradients {
    pub layers: Vec<LayerGradient>,
    /// `∂loss/∂input`, the upstream signal for the quantum layer.
    pub input: Vec<f64>,
}

impl NetworkGradients {
    /// Same layout as [`Network::flat_params`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            push_row_major(&mut out, &l.weights);
            out.extend(l.biases.iter());
        }
        out
    }
}

/// Cross-entropy gradients with the softmax/cross-entropy pair fused to `p − y`.
pub fn backward_network(net: &Network, cache: &ForwardCache, label: usize) -> Result<NetworkGradients> {
    let n_layers = net.layers.len();
    let stale = cache.inputs.len() != n_layers
        || cache.pre_activations.len() != n_layers
        || net.layers.iter().zip(&cache.inputs).zip(&cache.pre_activations).any(|((l, a), z)| {
            a.len() != l.input_dim() || z.len() != l.output_dim()
        });
    if stale {
        return Err(Error::Shape("forward cache does not match the network".into()));
    }
    if label >= net.n_classes() {
        return Err(Error::Input(format!(
            "label {label} out of range for {} classes",
            net.n_classes()
        )));
    }
    let mut delta = cache.probabilities.clone();
    delta[label] -= 1.0;

    let mut grads = Vec::with_capacity(n_layers);
    for idx in (0..n_layers).rev() {
        let layer = &net.layers[idx];
        grads.push(LayerGradient {
            weights: &delta * cache.inputs[idx].transpose(),
            biases: delta.clone(),
        });
        let mut upstream = layer.weights.tr_mul(&delta);
        if idx > 0 {
            let prev = &net.layers[idx - 1];
            if prev.activation == Activation::Relu {
                for (u, z) in upstream.iter_mut().zip(cache.pre_activations[idx - 1].iter()) {
                    if *z <= 0.0 {
                        *u = 0.0;
                    }
                }
            }
        }
        delta = upstream;
    }
    grads.reverse();
    Ok(NetworkGradients {
        layers: grads,
        input: delta.as_slice().to_vec(),
    })
}
