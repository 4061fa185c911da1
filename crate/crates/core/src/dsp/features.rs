use serde::{Deserialize, Serialize};

use super::filter::{apply_zero_phase_filter, design_butterworth_bandpass, FilterSpec, IirCoefficients};
use super::spectrum::{band_power, fft_power_spectrum, welch_psd, FrequencyBand, PsdEstimate, WelchConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    pub samples: Vec<f64>,
}

/// One multichannel EEG trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalRecord {
    sample_rate_hz: f64,
    channels: Vec<Channel>,
    trial_id: String,
    label: Option<usize>,
}

impl SignalRecord {
    /// Fails unless every channel has the same length of at least 2 samples
    /// and the sample rate is positive.
    pub fn new(
        trial_id: impl Into<String>,
        sample_rate_hz: f64,
        channels: Vec<Channel>,
        label: Option<usize>,
    ) -> Result<Self> {
        let trial_id = trial_id.into();
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::Input(format!(
                "trial {trial_id}: sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if let Some(first) = channels.first() {
            let len = first.samples.len();
            if len < 2 {
                return Err(Error::Input(format!("trial {trial_id}: channels need at least 2 samples")));
            }
            if let Some(bad) = channels.iter().find(|c| c.samples.len() != len) {
                return Err(Error::Input(format!(
                    "trial {trial_id}: channel '{}' has {} samples, expected {len}",
                    bad.name,
                    bad.samples.len()
                )));
            }
        }
        Ok(Self {
            sample_rate_hz,
            channels,
            trial_id,
            label,
        })
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn trial_id(&self) -> &str {
        &self.trial_id
    }

    pub fn label(&self) -> Option<usize> {
        self.label
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, |c| c.samples.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }
}

/// Delta, theta, alpha and beta band powers of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPowerVector {
    values: [f64; 4],
    standardized: bool,
}

impl BandPowerVector {
    /// Raw (unstandardized) powers; each must be finite and non-negative.
    pub fn raw(values: [f64; 4]) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Input(format!("band power must be finite and non-negative, got {v}")));
        }
        Ok(Self {
            values,
            standardized: false,
        })
    }

    /// Z-scored features, e.g. produced elsewhere or built by hand.
    pub fn standardized(values: [f64; 4]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("standardized features must be finite".into()));
        }
        Ok(Self {
            values,
            standardized: true,
        })
    }

    pub fn values(&self) -> [f64; 4] {
        self.values
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn delta(&self) -> f64 {
        self.values[0]
    }

    pub fn theta(&self) -> f64 {
        self.values[1]
    }

    pub fn alpha(&self) -> f64 {
        self.values[2]
    }

    pub fn beta(&self) -> f64 {
        self.values[3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMethod {
    #[default]
    Welch,
    Fft,
}

impl std::str::FromStr for SpectralMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "welch" => Ok(SpectralMethod::Welch),
            "fft" => Ok(SpectralMethod::Fft),
            other => Err(Error::Config(format!("unknown spectral method '{other}' (welch|fft)"))),
        }
    }
}

/// How per-channel band powers combine into one vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ChannelReduction {
    #[default]
    Mean,
}

/// Band powers of one channel via the chosen spectral route.
pub fn channel_band_powers(
    samples: &[f64],
    sample_rate_hz: f64,
    welch_cfg: &WelchConfig,
    method: SpectralMethod,
) -> Result<[f64; 4]> {
    let psd: PsdEstimate = match method {
        SpectralMethod::Welch => welch_psd(samples, sample_rate_hz, welch_cfg)?,
        SpectralMethod::Fft => fft_power_spectrum(samples, sample_rate_hz)?,
    };
    let mut out = [0.0; 4];
    for (o, band) in out.iter_mut().zip(FrequencyBand::CANONICAL.iter()) {
        *o = band_power(&psd, band)?;
    }
    Ok(out)
}

/// Reusable extractor: designs the bandpass once and applies it to many trials.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    filter_spec: FilterSpec,
    coeffs: IirCoefficients,
    welch: WelchConfig,
    method: SpectralMethod,
    reduction: ChannelReduction,
}

impl FeatureExtractor {
    pub fn new(filter_spec: FilterSpec, welch: WelchConfig, method: SpectralMethod) -> Result<Self> {
        welch.validate()?;
        let coeffs = design_butterworth_bandpass(&filter_spec)?;
        Ok(Self {
            filter_spec,
            coeffs,
            welch,
            method,
            reduction: ChannelReduction::Mean,
        })
    }

    pub fn with_reduction(mut self, reduction: ChannelReduction) -> Self {
        self.reduction = reduction;
        self
    }

    pub fn coefficients(&self) -> &IirCoefficients {
        &self.coeffs
    }

    pub fn extract(&self, record: &SignalRecord) -> Result<BandPowerVector> {
        self.extract_inner(record).map_err(|e| e.in_trial(record.trial_id()))
    }

    fn extract_inner(&self, record: &SignalRecord) -> Result<BandPowerVector> {
        if record.channels().is_empty() {
            return Err(Error::Input("record has no channels".into()));
        }
        if (record.sample_rate_hz() - self.filter_spec.sample_rate_hz).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "record sampled at {} Hz but filter designed for {} Hz",
                record.sample_rate_hz(),
                self.filter_spec.sample_rate_hz
            )));
        }
        if self.method == SpectralMethod::Welch && record.len() < self.welch.segment_length {
            return Err(Error::Input(format!(
                "insufficient data: {:.3} s trial is shorter than one {}-sample Welch segment",
                record.duration_s(),
                self.welch.segment_length
            )));
        }
        let mut sum = [0.0; 4];
        for ch in record.channels() {
            let filtered = apply_zero_phase_filter(&self.coeffs, &ch.samples)?;
            let powers = channel_band_powers(&filtered, record.sample_rate_hz(), &self.welch, self.method)?;
            for (s, p) in sum.iter_mut().zip(powers) {
                *s += p;
            }
        }
        let reduced = match self.reduction {
            ChannelReduction::Mean => sum.map(|s| s / record.channels().len() as f64),
        };
        BandPowerVector::raw(reduced)
    }
}

/// Filter every channel, take per-channel band powers and average them.
pub fn extract_band_features(
    record: &SignalRecord,
    filter_spec: &FilterSpec,
    welch_cfg: &WelchConfig,
    method: SpectralMethod,
) -> Result<BandPowerVector> {
    FeatureExtractor::new(*filter_spec, *welch_cfg, method)
        .map_err(|e| e.in_trial(record.trial_id()))?
        .extract(record)
}
