//! Flat pipeline configuration. Every key is optional in a file; missing keys
//! keep their defaults and unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dsp::{Detrend, FilterSpec, SpectralMethod, WelchConfig, WindowKind};
use crate::error::{Error, Result};
use crate::hybrid::TrainingConfig;
use crate::qcircuit::{AnsatzSpec, Entanglement};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub sample_rate_hz: f64,
    pub low_cut_hz: f64,
    pub high_cut_hz: f64,
    pub filter_order: usize,
    pub method: SpectralMethod,
    pub segment_length: usize,
    pub overlap_fraction: f64,
    pub n_qubits: usize,
    pub depth: usize,
    pub entanglement: Entanglement,
    pub hidden: Vec<usize>,
    pub n_classes: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
    pub train_fraction: f64,
    pub threads: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let filter = FilterSpec::default();
        let welch = WelchConfig::default();
        let ansatz = AnsatzSpec::default();
        let train = TrainingConfig::default();
        Self {
            sample_rate_hz: filter.sample_rate_hz,
            low_cut_hz: filter.low_cut_hz,
            high_cut_hz: filter.high_cut_hz,
            filter_order: filter.order,
            method: SpectralMethod::Welch,
            segment_length: welch.segment_length,
            overlap_fraction: welch.overlap_fraction,
            n_qubits: ansatz.n_qubits,
            depth: ansatz.depth,
            entanglement: ansatz.entanglement,
            hidden: train.hidden,
            n_classes: 2,
            learning_rate: train.learning_rate,
            beta1: train.beta1,
            beta2: train.beta2,
            epsilon: train.epsilon,
            batch_size: train.batch_size,
            epochs: train.epochs,
            seed: train.seed,
            shuffle: train.shuffle,
            train_fraction: train.train_fraction,
            threads: train.threads,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn filter_spec(&self) -> FilterSpec {
        FilterSpec {
            low_cut_hz: self.low_cut_hz,
            high_cut_hz: self.high_cut_hz,
            order: self.filter_order,
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    pub fn welch(&self) -> WelchConfig {
        WelchConfig {
            segment_length: self.segment_length,
            overlap_fraction: self.overlap_fraction,
            window: WindowKind::Hann,
            detrend: Detrend::Constant,
        }
    }

    pub fn ansatz(&self) -> AnsatzSpec {
        AnsatzSpec {
            n_qubits: self.n_qubits,
            depth: self.depth,
            entanglement: self.entanglement,
        }
    }

    pub fn training(&self) -> TrainingConfig {
        TrainingConfig {
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            epochs: self.epochs,
            seed: self.seed,
            shuffle: self.shuffle,
            train_fraction: self.train_fraction,
            ansatz: self.ansatz(),
            hidden: self.hidden.clone(),
            n_classes: Some(self.n_classes),
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
            threads: self.threads,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.filter_spec().validate()?;
        self.welch().validate()?;
        self.training().validate()
    }
}
