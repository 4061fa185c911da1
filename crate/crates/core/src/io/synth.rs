//! Synthetic multichannel EEG with class-specific band profiles.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dsp::{Channel, SignalRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub freq_hz: f64,
    pub amplitude: f64,
}

impl Tone {
    pub const fn new(freq_hz: f64, amplitude: f64) -> Self {
        Self { freq_hz, amplitude }
    }
}

/// One sinusoid per band, in delta, theta, alpha, beta order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassProfile {
    pub tones: [Tone; 4],
}

const DELTA: Tone = Tone::new(2.0, 1.0);
const THETA: Tone = Tone::new(6.0, 1.0);

impl ClassProfile {
    /// Alpha-dominant: 10 Hz at amplitude 3, 20 Hz beta at amplitude 1.
    pub const ALPHA_DOMINANT: ClassProfile = ClassProfile {
        tones: [DELTA, THETA, Tone::new(10.0, 3.0), Tone::new(20.0, 1.0)],
    };
    /// Beta-dominant: 20 Hz at amplitude 3, 10 Hz alpha at amplitude 1.
    pub const BETA_DOMINANT: ClassProfile = ClassProfile {
        tones: [DELTA, THETA, Tone::new(10.0, 1.0), Tone::new(20.0, 3.0)],
    };
    pub const THETA_DOMINANT: ClassProfile = ClassProfile {
        tones: [DELTA, Tone::new(6.0, 3.0), Tone::new(10.0, 1.0), Tone::new(20.0, 1.0)],
    };
    pub const DELTA_DOMINANT: ClassProfile = ClassProfile {
        tones: [Tone::new(2.0, 3.0), THETA, Tone::new(10.0, 1.0), Tone::new(20.0, 1.0)],
    };

    /// The built-in profiles, one per class, for up to four classes.
    pub fn defaults(n_classes: usize) -> Result<Vec<ClassProfile>> {
        let all = [
            Self::ALPHA_DOMINANT,
            Self::BETA_DOMINANT,
            Self::THETA_DOMINANT,
            Self::DELTA_DOMINANT,
        ];
        if !(2..=all.len()).contains(&n_classes) {
            return Err(Error::Config(format!(
                "built-in profiles cover 2 to {} classes, got {n_classes}",
                all.len()
            )));
        }
        Ok(all[..n_classes].to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_trials_per_class: usize,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub n_channels: usize,
    /// One profile per class; the class count is its length.
    pub class_profiles: Vec<ClassProfile>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_trials_per_class: 100,
            duration_s: 4.0,
            sample_rate_hz: 250.0,
            n_channels: 2,
            class_profiles: vec![ClassProfile::ALPHA_DOMINANT, ClassProfile::BETA_DOMINANT],
            noise_sigma: 1.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn n_classes(&self) -> usize {
        self.class_profiles.len()
    }

    pub fn n_samples(&self) -> usize {
        (self.duration_s * self.sample_rate_hz).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials_per_class < 1 || self.n_channels < 1 {
            return Err(Error::Config("need at least one trial per class and one channel".into()));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::Config(format!("sample rate must be positive, got {}", self.sample_rate_hz)));
        }
        if self.n_samples() < 2 {
            return Err(Error::Config(format!("duration {} s yields fewer than 2 samples", self.duration_s)));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Config(format!("noise sigma must be >= 0, got {}", self.noise_sigma)));
        }
        if self.class_profiles.is_empty() {
            return Err(Error::Config("need at least one class profile".into()));
        }
        let nyquist = self.sample_rate_hz / 2.0;
        for (c, p) in self.class_profiles.iter().enumerate() {
            for t in &p.tones {
                if !(t.freq_hz >= 0.0 && t.freq_hz < nyquist) {
                    return Err(Error::Config(format!(
                        "class {c}: tone at {} Hz is not below Nyquist ({nyquist} Hz)",
                        t.freq_hz
                    )));
                }
                if !(t.amplitude.is_finite() && t.amplitude >= 0.0) {
                    return Err(Error::Config(format!("class {c}: amplitude must be >= 0, got {}", t.amplitude)));
                }
            }
            if self.class_profiles[..c].contains(p) {
                return Err(Error::Config(format!("class {c} duplicates an earlier profile")));
            }
        }
        Ok(())
    }
}

/// Generates `n_trials_per_class` trials per class, classes interleaved
/// (trial `k` has label `k % n_classes`). Every channel gets its own random
/// phases and noise. Deterministic given `spec.seed`.
pub fn generate_synthetic_eeg(spec: &SynthSpec) -> Result<(Vec<SignalRecord>, Vec<usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::Config(e.to_string()))?;
    let n = spec.n_samples();
    let fs = spec.sample_rate_hz;
    let total = spec.n_trials_per_class * spec.n_classes();
    let mut records = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for k in 0..total {
        let label = k % spec.n_classes();
        let profile = &spec.class_profiles[label];
        let channels = (0..spec.n_channels)
            .map(|ch| {
                let phases: Vec<f64> = profile.tones.iter().map(|_| rng.random_range(0.0..2.0 * PI)).collect();
                let samples = (0..n)
                    .map(|i| {
                        let t = i as f64 / fs;
                        let clean: f64 = profile
                            .tones
                            .iter()
                            .zip(&phases)
                            .map(|(tone, ph)| tone.amplitude * (2.0 * PI * tone.freq_hz * t + ph).sin())
                            .sum();
                        clean + noise.sample(&mut rng)
                    })
                    .collect();
                Channel {
                    name: format!("ch{}", ch + 1),
                    samples,
                }
            })
            .collect();
        records.push(SignalRecord::new(k.to_string(), fs, channels, Some(label))?);
        labels.push(label);
    }
    Ok((records, labels))
}
