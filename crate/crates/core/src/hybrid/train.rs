use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{hybrid_forward, loss_and_gradients_with, mean_loss, HybridModel, Parallelism};
use crate::dsp::{fit_standardizer, BandPowerVector};
use crate::error::{Error, Result};
use crate::eval::{evaluate, Averaging, EvalReport};
use crate::neural::{AdamConfig, AdamState, NetworkSpec};
use crate::qcircuit::{AnsatzSpec, EncodingSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<BandPowerVector>,
    labels: Vec<usize>,
    pub class_names: Option<Vec<String>>,
}

impl LabeledDataset {
    pub fn new(features: Vec<BandPowerVector>, labels: Vec<usize>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} feature vectors but {} labels",
                features.len(),
                labels.len()
            )));
        }
        Ok(Self {
            features,
            labels,
            class_names: None,
        })
    }

    pub fn features(&self) -> &[BandPowerVector] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `max(label) + 1`, or 0 when empty.
    pub fn n_classes_seen(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            features: indices.iter().map(|&i| self.features[i]).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }
}

/// Per-class shuffled split; every class with at least two samples lands in
/// both halves. Returns `(train, test)` indices, test sorted ascending.
pub fn stratified_split<R: rand::Rng>(
    labels: &[usize],
    n_classes: usize,
    train_fraction: f64,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..n_classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < 2 {
            return Err(Error::Input(format!(
                "class {class} has {} samples; a stratified split needs at least 2",
                idx.len()
            )));
        }
        idx.shuffle(rng);
        let n_train = ((idx.len() as f64 * train_fraction).round() as usize).clamp(1, idx.len() - 1);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    test.sort_unstable();
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
    pub train_fraction: f64,
    pub ansatz: AnsatzSpec,
    pub hidden: Vec<usize>,
    /// `None` infers the class count from the labels (at least 2).
    pub n_classes: Option<usize>,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Worker threads for per-sample gradients; 1 is the reference path.
    pub threads: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        let adam = AdamConfig::default();
        Self {
            learning_rate: adam.learning_rate,
            batch_size: 32,
            epochs: 20,
            seed: 0,
            shuffle: true,
            train_fraction: 0.8,
            ansatz: AnsatzSpec::default(),
            hidden: NetworkSpec::default().hidden,
            n_classes: None,
            beta1: adam.beta1,
            beta2: adam.beta2,
            epsilon: adam.epsilon,
            threads: 1,
        }
    }
}

impl TrainingConfig {
    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.threads < 1 {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        self.ansatz.validate()?;
        self.adam().validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean cross-entropy over the epoch's minibatches, weighted by batch size.
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    /// Full-pass training loss before the first update.
    pub initial_loss: f64,
    /// Full-pass training loss after the last update.
    pub final_loss: f64,
    pub epochs: Vec<EpochStats>,
    pub test: EvalReport,
    pub wall_clock_s: f64,
}

impl fmt::Display for TrainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed: {}  train: {}  test: {}", self.seed, self.train_size, self.test_size)?;
        writeln!(f, "initial loss: {:.6}", self.initial_loss)?;
        writeln!(f, "epoch      loss  accuracy")?;
        for e in &self.epochs {
            writeln!(f, "{:>5}  {:>8.6}  {:>8.4}", e.epoch, e.loss, e.accuracy)?;
        }
        writeln!(f, "final loss: {:.6}", self.final_loss)?;
        writeln!(f, "wall clock: {:.2} s", self.wall_clock_s)?;
        writeln!(f, "-- test split --")?;
        write!(f, "{}", self.test)
    }
}

/// Probabilities for every sample, in order.
pub fn predict_probabilities(model: &HybridModel, features: &[BandPowerVector]) -> Result<Vec<Vec<f64>>> {
    features.iter().map(|x| hybrid_forward(model, x)).collect()
}

/// Evaluates `model` on a labelled set. Binary averaging for two classes,
/// macro otherwise.
pub fn evaluate_model(model: &HybridModel, data: &LabeledDataset) -> Result<EvalReport> {
    if let Some(&bad) = data.labels().iter().find(|&&l| l >= model.n_classes()) {
        return Err(Error::Shape(format!(
            "label {bad} does not exist in a model with {} classes",
            model.n_classes()
        )));
    }
    let averaging = if model.n_classes() == 2 {
        Averaging::BinaryPositive
    } else {
        Averaging::Macro
    };
    let probs = predict_probabilities(model, data.features())?;
    evaluate(&probs, data.labels(), model.n_classes(), averaging)
}

/// Joint training of ansatz angles and dense weights with one Adam state.
///
/// All randomness (split, initialization, epoch shuffles) comes from one
/// ChaCha stream seeded with `cfg.seed`, so a run is reproducible bit for bit
/// regardless of `cfg.threads`.
pub fn fit(dataset: &LabeledDataset, cfg: &TrainingConfig) -> Result<(HybridModel, TrainReport)> {
    let started = Instant::now();
    cfg.validate()?;
    let n_classes = cfg.n_classes.unwrap_or(dataset.n_classes_seen().max(2));
    if n_classes < 2 {
        return Err(Error::Config("need at least 2 classes".into()));
    }
    if let Some(&bad) = dataset.labels().iter().find(|&&l| l >= n_classes) {
        return Err(Error::Shape(format!("label {bad} out of range for {n_classes} classes")));
    }
    let present = (0..n_classes).filter(|c| dataset.labels().contains(c)).count();
    if present < 2 {
        return Err(Error::Input("training data must contain at least 2 classes".into()));
    }
    if dataset.len() < cfg.batch_size {
        return Err(Error::Input(format!(
            "{} samples is fewer than one batch of {}",
            dataset.len(),
            cfg.batch_size
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let present_classes: Vec<usize> = (0..n_classes).filter(|c| dataset.labels().contains(c)).collect();
    let (train_idx, test_idx) = split_present(dataset.labels(), &present_classes, cfg.train_fraction, &mut rng)?;
    let train = dataset.subset(&train_idx);
    let test = dataset.subset(&test_idx);

    let standardizer = fit_standardizer(train.features())?;
    let network_spec = NetworkSpec {
        input_dim: cfg.ansatz.n_qubits,
        hidden: cfg.hidden.clone(),
        n_classes,
    };
    let mut model = HybridModel::initialize(
        EncodingSpec {
            n_features: cfg.ansatz.n_qubits,
            ..EncodingSpec::default()
        },
        cfg.ansatz,
        &network_spec,
        standardizer,
        cfg.adam(),
        &mut rng,
    )?;

    let parallelism = if cfg.threads > 1 {
        Parallelism::Threads(cfg.threads)
    } else {
        Parallelism::Sequential
    };
    let initial_loss = mean_loss(&model, train.features(), train.labels())?;
    let mut adam = AdamState::new(cfg.adam(), model.n_params())?;
    let mut params = model.flat_params();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut epochs = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let (mut loss_sum, mut correct) = (0.0, 0usize);
        for batch in order.chunks(cfg.batch_size) {
            let xs: Vec<BandPowerVector> = batch.iter().map(|&i| train.features()[i]).collect();
            let ys: Vec<usize> = batch.iter().map(|&i| train.labels()[i]).collect();
            let g = loss_and_gradients_with(&model, &xs, &ys, parallelism)?;
            loss_sum += g.loss * batch.len() as f64;
            correct += g.correct;
            adam.step(&mut params, &g.flatten())?;
            model.set_flat_params(&params)?;
        }
        epochs.push(EpochStats {
            epoch: epoch + 1,
            loss: loss_sum / train.len() as f64,
            accuracy: correct as f64 / train.len() as f64,
        });
        log::debug!("epoch {} loss {:.6}", epoch + 1, loss_sum / train.len() as f64);
    }
    let final_loss = mean_loss(&model, train.features(), train.labels())?;
    let test_report = evaluate_model(&model, &test)?;
    let report = TrainReport {
        seed: cfg.seed,
        train_size: train.len(),
        test_size: test.len(),
        initial_loss,
        final_loss,
        epochs,
        test: test_report,
        wall_clock_s: started.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}

/// Stratified split over the classes that actually occur.
fn split_present<R: rand::Rng>(
    labels: &[usize],
    classes: &[usize],
    train_fraction: f64,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>)> {
    // Remap to dense class ids so stratified_split sees 0..k.
    let dense: Vec<usize> = labels
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap_or(usize::MAX))
        .collect();
    stratified_split(&dense, classes.len(), train_fraction, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n_per_class: usize) -> LabeledDataset {
        let mut f = Vec::new();
        let mut l = Vec::new();
        for i in 0..n_per_class {
            let jitter = 0.05 * (i % 7) as f64;
            f.push(BandPowerVector::raw([1.0 + jitter, 1.0, 4.0 + jitter, 1.0]).unwrap());
            l.push(0);
            f.push(BandPowerVector::raw([1.0 + jitter, 1.0, 1.0, 4.0 + jitter]).unwrap());
            l.push(1);
        }
        LabeledDataset::new(f, l).unwrap()
    }

    #[test]
    fn split_is_stratified_and_disjoint() {
        let labels: Vec<usize> = (0..50).map(|i| usize::from(i % 5 == 0)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (train, test) = stratified_split(&labels, 2, 0.8, &mut rng).unwrap();
        assert_eq!(train.len() + test.len(), 50);
        assert_eq!(train.iter().filter(|&&i| labels[i] == 1).count(), 8);
        assert_eq!(test.iter().filter(|&&i| labels[i] == 1).count(), 2);
        let mut all: Vec<_> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn split_needs_two_per_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(stratified_split(&[0, 0, 1], 2, 0.8, &mut rng).is_err());
    }

    #[test]
    fn config_validation() {
        let zero_epochs = TrainingConfig {
            epochs: 0,
            ..TrainingConfig::default()
        };
        assert!(matches!(fit(&toy(20), &zero_epochs), Err(Error::Config(_))));
        let bad_fraction = TrainingConfig {
            train_fraction: 1.0,
            ..TrainingConfig::default()
        };
        assert!(bad_fraction.validate().is_err());
    }

    #[test]
    fn degenerate_datasets_rejected() {
        let one_class = LabeledDataset::new(vec![BandPowerVector::raw([1.0; 4]).unwrap(); 40], vec![0; 40]).unwrap();
        assert!(matches!(fit(&one_class, &TrainingConfig::default()), Err(Error::Input(_))));
        assert!(matches!(fit(&toy(10), &TrainingConfig::default()), Err(Error::Input(_))));
    }

    #[test]
    fn report_shape_and_determinism() {
        let cfg = TrainingConfig {
            epochs: 3,
            batch_size: 8,
            seed: 9,
            ..TrainingConfig::default()
        };
        let data = toy(20);
        let (m1, r1) = fit(&data, &cfg).unwrap();
        let (m2, r2) = fit(&data, &cfg).unwrap();
        assert_eq!(r1.epochs.len(), 3);
        assert_eq!(r1.epochs, r2.epochs);
        assert_eq!(m1.flat_params(), m2.flat_params());
        assert_eq!(r1.train_size, 32);
        assert_eq!(r1.test_size, 8);
    }

    #[test]
    fn threads_do_not_change_the_result() {
        let data = toy(20);
        let base = TrainingConfig {
            epochs: 2,
            batch_size: 8,
            ..TrainingConfig::default()
        };
        let threaded = TrainingConfig {
            threads: 3,
            ..base.clone()
        };
        let (a, _) = fit(&data, &base).unwrap();
        let (b, _) = fit(&data, &threaded).unwrap();
        assert_eq!(a.flat_params(), b.flat_params());
    }

    #[test]
    fn standardizer_uses_train_split_only() {
        let cfg = TrainingConfig {
            epochs: 1,
            batch_size: 8,
            seed: 4,
            ..TrainingConfig::default()
        };
        let data = toy(20);
        let (model, _) = fit(&data, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (train_idx, _) = stratified_split(data.labels(), 2, cfg.train_fraction, &mut rng).unwrap();
        let expected = fit_standardizer(data.subset(&train_idx).features()).unwrap();
        assert_eq!(*model.standardizer(), expected);
        let everything = fit_standardizer(data.features()).unwrap();
        assert_ne!(*model.standardizer(), everything);
    }
}
