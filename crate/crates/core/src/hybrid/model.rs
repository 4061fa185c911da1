use rand::Rng;
use rayon::prelude::*;

use crate::dsp::{apply_standardizer, BandPowerVector, StandardizerStats};
use crate::error::{Error, Result};
use crate::eval::argmax;
use crate::neural::{backward_network, cross_entropy, forward_network, init_network, AdamConfig, Network, NetworkSpec};
use crate::qcircuit::{parameter_shift_gradient, quantum_forward, AnsatzSpec, EncodingSpec, ParameterVector};

/// Standardizer, quantum feature layer and dense head.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    encoding: EncodingSpec,
    ansatz: AnsatzSpec,
    quantum_params: ParameterVector,
    network: Network,
    standardizer: StandardizerStats,
    /// Optimizer settings the model was trained with; kept for the model file.
    pub adam: AdamConfig,
}

impl HybridModel {
    pub fn new(
        encoding: EncodingSpec,
        ansatz: AnsatzSpec,
        quantum_params: ParameterVector,
        network: Network,
        standardizer: StandardizerStats,
        adam: AdamConfig,
    ) -> Result<Self> {
        ansatz.validate()?;
        if encoding.n_features != ansatz.n_qubits {
            return Err(Error::Shape(format!(
                "encoding has {} features but the ansatz has {} qubits",
                encoding.n_features, ansatz.n_qubits
            )));
        }
        if quantum_params.len() != ansatz.n_params() {
            return Err(Error::Shape(format!(
                "ansatz needs {} parameters, got {}",
                ansatz.n_params(),
                quantum_params.len()
            )));
        }
        if network.input_dim() != ansatz.n_qubits {
            return Err(Error::Shape(format!(
                "quantum layer yields {} values but the network expects {}",
                ansatz.n_qubits,
                network.input_dim()
            )));
        }
        if standardizer.std_dev.iter().any(|s| !s.is_finite() || *s < 0.0)
            || standardizer.mean.iter().any(|m| !m.is_finite())
        {
            return Err(Error::Input("standardizer statistics must be finite with std >= 0".into()));
        }
        Ok(Self {
            encoding,
            ansatz,
            quantum_params,
            network,
            standardizer,
            adam,
        })
    }

    /// Fresh model: ansatz angles uniform in `[-0.1, 0.1]`, Glorot-uniform
    /// dense layers, all drawn from `rng`.
    pub fn initialize<R: Rng>(
        encoding: EncodingSpec,
        ansatz: AnsatzSpec,
        network_spec: &NetworkSpec,
        standardizer: StandardizerStats,
        adam: AdamConfig,
        rng: &mut R,
    ) -> Result<Self> {
        ansatz.validate()?;
        let angles = (0..ansatz.n_params()).map(|_| rng.random_range(-0.1..=0.1)).collect();
        let network = init_network(network_spec, rng.next_u64())?;
        Self::new(encoding, ansatz, ParameterVector::new(angles)?, network, standardizer, adam)
    }

    pub fn encoding(&self) -> &EncodingSpec {
        &self.encoding
    }

    pub fn ansatz(&self) -> &AnsatzSpec {
        &self.ansatz
    }

    pub fn quantum_params(&self) -> &ParameterVector {
        &self.quantum_params
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn standardizer(&self) -> &StandardizerStats {
        &self.standardizer
    }

    pub fn n_classes(&self) -> usize {
        self.network.n_classes()
    }

    pub fn n_params(&self) -> usize {
        self.quantum_params.len() + self.network.n_params()
    }

    /// Quantum angles followed by the network's flat parameters.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = self.quantum_params.values().to_vec();
        out.extend(self.network.flat_params());
        out
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::Shape(format!("expected {} parameters, got {}", self.n_params(), flat.len())));
        }
        let (q, c) = flat.split_at(self.quantum_params.len());
        self.quantum_params = ParameterVector::new(q.to_vec())?;
        self.network.set_flat_params(c)
    }

    fn quantum_features(&self, standardized: &BandPowerVector) -> Result<Vec<f64>> {
        quantum_forward(standardized, &self.quantum_params, &self.encoding, &self.ansatz)
    }
}

/// Class probabilities for raw (unstandardized) band powers.
pub fn hybrid_forward(model: &HybridModel, raw_features: &BandPowerVector) -> Result<Vec<f64>> {
    let z = apply_standardizer(&model.standardizer, raw_features).map_err(|e| e.in_stage("standardize"))?;
    let q = model.quantum_features(&z).map_err(|e| e.in_stage("quantum"))?;
    let (p, _) = forward_network(&model.network, &q).map_err(|e| e.in_stage("classical"))?;
    Ok(p)
}

/// Most probable class; ties resolve to the lowest index.
pub fn predict(model: &HybridModel, raw_features: &BandPowerVector) -> Result<usize> {
    Ok(argmax(&hybrid_forward(model, raw_features)?))
}

/// Batch-mean loss and gradients. `quantum` follows the ansatz parameter
/// order, `classical` the network's flat layout.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchGradients {
    pub loss: f64,
    pub quantum: Vec<f64>,
    pub classical: Vec<f64>,
    /// Samples whose argmax matched the label, before any update.
    pub correct: usize,
}

impl BatchGradients {
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = self.quantum.clone();
        out.extend_from_slice(&self.classical);
        out
    }
}

struct SampleGradient {
    loss: f64,
    quantum: Vec<f64>,
    classical: Vec<f64>,
    correct: bool,
}

fn sample_gradient(model: &HybridModel, raw: &BandPowerVector, label: usize) -> Result<SampleGradient> {
    let z = apply_standardizer(&model.standardizer, raw).map_err(|e| e.in_stage("standardize"))?;
    let q = model.quantum_features(&z).map_err(|e| e.in_stage("quantum"))?;
    let (p, cache) = forward_network(&model.network, &q).map_err(|e| e.in_stage("classical"))?;
    let loss = cross_entropy(&p, label)?;
    let g = backward_network(&model.network, &cache, label).map_err(|e| e.in_stage("classical"))?;
    let quantum = parameter_shift_gradient(&z, &model.quantum_params, &model.encoding, &model.ansatz, &g.input)
        .map_err(|e| e.in_stage("quantum"))?;
    Ok(SampleGradient {
        loss,
        quantum,
        classical: g.flatten(),
        correct: argmax(&p) == label,
    })
}

/// How per-sample gradients are computed. Results are reduced in sample
/// order either way, so both modes give bit-identical sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Sequential,
    Threads(usize),
}

pub fn loss_and_gradients(
    model: &HybridModel,
    features: &[BandPowerVector],
    labels: &[usize],
) -> Result<BatchGradients> {
    loss_and_gradients_with(model, features, labels, Parallelism::Sequential)
}

pub fn loss_and_gradients_with(
    model: &HybridModel,
    features: &[BandPowerVector],
    labels: &[usize],
    parallelism: Parallelism,
) -> Result<BatchGradients> {
    if features.is_empty() {
        return Err(Error::Input("gradient batch is empty".into()));
    }
    if features.len() != labels.len() {
        return Err(Error::Shape(format!("{} samples but {} labels", features.len(), labels.len())));
    }
    let per_sample: Vec<SampleGradient> = match parallelism {
        Parallelism::Threads(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?;
            pool.install(|| {
                features
                    .par_iter()
                    .zip(labels.par_iter())
                    .map(|(x, &y)| sample_gradient(model, x, y))
                    .collect::<Result<Vec<_>>>()
            })?
        }
        _ => features
            .iter()
            .zip(labels)
            .map(|(x, &y)| sample_gradient(model, x, y))
            .collect::<Result<Vec<_>>>()?,
    };

    let n = per_sample.len() as f64;
    let mut out = BatchGradients {
        loss: 0.0,
        quantum: vec![0.0; model.quantum_params.len()],
        classical: vec![0.0; model.network.n_params()],
        correct: 0,
    };
    for s in &per_sample {
        out.loss += s.loss;
        out.correct += usize::from(s.correct);
        for (a, g) in out.quantum.iter_mut().zip(&s.quantum) {
            *a += g;
        }
        for (a, g) in out.classical.iter_mut().zip(&s.classical) {
            *a += g;
        }
    }
    out.loss /= n;
    out.quantum.iter_mut().for_each(|g| *g /= n);
    out.classical.iter_mut().for_each(|g| *g /= n);
    Ok(out)
}

/// Mean cross-entropy of the model over a labelled set.
pub fn mean_loss(model: &HybridModel, features: &[BandPowerVector], labels: &[usize]) -> Result<f64> {
    if features.is_empty() {
        return Err(Error::Input("cannot evaluate loss on an empty set".into()));
    }
    let mut total = 0.0;
    for (x, &y) in features.iter().zip(labels) {
        total += cross_entropy(&hybrid_forward(model, x)?, y)?;
    }
    Ok(total / features.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(seed: u64) -> HybridModel {
        let stats = StandardizerStats {
            mean: [1.0, 2.0, 3.0, 4.0],
            std_dev: [0.5, 1.0, 1.5, 2.0],
        };
        HybridModel::initialize(
            EncodingSpec::default(),
            AnsatzSpec::default(),
            &NetworkSpec::default(),
            stats,
            AdamConfig::default(),
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap()
    }

    fn raw(v: [f64; 4]) -> BandPowerVector {
        BandPowerVector::raw(v).unwrap()
    }

    #[test]
    fn initial_angles_are_small() {
        let m = model(3);
        assert_eq!(m.quantum_params().len(), 24);
        assert!(m.quantum_params().values().iter().all(|a| a.abs() <= 0.1));
    }

    #[test]
    fn forward_is_a_pure_probability_map() {
        let m = model(0);
        let x = raw([1.2, 0.4, 5.0, 2.2]);
        let p = hybrid_forward(&m, &x).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(p, hybrid_forward(&m, &x).unwrap());
    }

    #[test]
    fn forward_errors_carry_stage() {
        let m = model(0);
        let z = BandPowerVector::standardized([0.0; 4]).unwrap();
        let err = hybrid_forward(&m, &z).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "standardize", .. }));
    }

    #[test]
    fn duplicate_batch_matches_single() {
        let m = model(1);
        let x = raw([0.3, 2.5, 4.0, 1.0]);
        let one = loss_and_gradients(&m, &[x], &[1]).unwrap();
        let two = loss_and_gradients(&m, &[x, x], &[1, 1]).unwrap();
        assert!((one.loss - two.loss).abs() < 1e-15);
        for (a, b) in one.flatten().iter().zip(two.flatten()) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn threaded_gradients_are_bit_identical() {
        let m = model(2);
        let xs: Vec<_> = (0..9).map(|i| raw([i as f64, 1.0 + i as f64 * 0.5, 3.0, 2.0])).collect();
        let ys: Vec<_> = (0..9).map(|i| i % 2).collect();
        let seq = loss_and_gradients_with(&m, &xs, &ys, Parallelism::Sequential).unwrap();
        let par = loss_and_gradients_with(&m, &xs, &ys, Parallelism::Threads(4)).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn empty_batch_rejected() {
        assert!(loss_and_gradients(&model(0), &[], &[]).is_err());
    }

    #[test]
    fn flat_params_roundtrip() {
        let mut m = model(4);
        let flat = m.flat_params();
        assert_eq!(flat.len(), 24 + m.network().n_params());
        let shifted: Vec<f64> = flat.iter().map(|v| v + 0.5).collect();
        m.set_flat_params(&shifted).unwrap();
        assert_eq!(m.flat_params(), shifted);
    }

    #[test]
    fn mismatched_network_rejected() {
        let m = model(0);
        let wide = init_network(
            &NetworkSpec {
                input_dim: 5,
                ..NetworkSpec::default()
            },
            0,
        )
        .unwrap();
        let err = HybridModel::new(
            *m.encoding(),
            *m.ansatz(),
            m.quantum_params().clone(),
            wide,
            *m.standardizer(),
            m.adam,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }
}
