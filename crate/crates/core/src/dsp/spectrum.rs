//! One-sided power spectral density estimates.
//!
//! Both estimators share the density convention `|X[k]|² / (fs · Σw²)` with
//! every bin except DC and Nyquist doubled, so `Σ P[k] · Δf` equals the
//! signal variance and band powers from the two routes are comparable.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Detrend {
    #[default]
    Constant,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchConfig {
    pub segment_length: usize,
    pub overlap_fraction: f64,
    pub window: WindowKind,
    pub detrend: Detrend,
}

impl Default for WelchConfig {
    /// 256-sample Hann segments with 50% overlap and mean removal.
    fn default() -> Self {
        Self {
            segment_length: 256,
            overlap_fraction: 0.5,
            window: WindowKind::Hann,
            detrend: Detrend::Constant,
        }
    }
}

impl WelchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.segment_length < 8 {
            return Err(Error::Config(format!(
                "Welch segment length must be at least 8 samples, got {}",
                self.segment_length
            )));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::Config(format!(
                "Welch overlap fraction must lie in [0, 1), got {}",
                self.overlap_fraction
            )));
        }
        Ok(())
    }

    pub fn overlap_samples(&self) -> usize {
        (self.segment_length as f64 * self.overlap_fraction).floor() as usize
    }

    pub fn step(&self) -> usize {
        self.segment_length - self.overlap_samples()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    pub frequencies_hz: Vec<f64>,
    /// Signal units squared per Hz.
    pub power_density: Vec<f64>,
    pub resolution_hz: f64,
}

impl PsdEstimate {
    /// `Σ P[k] · Δf` over every bin.
    pub fn total_power(&self) -> f64 {
        self.power_density.iter().sum::<f64>() * self.resolution_hz
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequencies_hz.last().copied().unwrap_or(0.0)
    }
}

fn hann_periodic(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// One-sided periodogram of `x` (already detrended and windowed) with the
/// shared density scaling; `window_energy` is `Σw²`.
fn one_sided_density(planner: &mut FftPlanner<f64>, x: &[f64], fs: f64, window_energy: f64) -> Vec<f64> {
    let n = x.len();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    let bins = n / 2 + 1;
    let scale = 1.0 / (fs * window_energy);
    let mut out: Vec<f64> = buf[..bins].iter().map(|c| c.norm_sqr() * scale).collect();
    // DC is never doubled; Nyquist exists only for even n.
    let doubled_end = if n % 2 == 0 { bins - 1 } else { bins };
    for p in &mut out[1..doubled_end] {
        *p *= 2.0;
    }
    out
}

fn frequencies(n: usize, fs: f64) -> Vec<f64> {
    (0..n / 2 + 1).map(|k| k as f64 * fs / n as f64).collect()
}

fn check_rate(sample_rate_hz: f64) -> Result<()> {
    if sample_rate_hz.is_finite() && sample_rate_hz > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("sample rate must be positive, got {sample_rate_hz}")))
    }
}

/// Welch PSD: mean of windowed, detrended, overlapping segment periodograms.
/// A trailing partial segment is discarded.
pub fn welch_psd(samples: &[f64], sample_rate_hz: f64, cfg: &WelchConfig) -> Result<PsdEstimate> {
    cfg.validate()?;
    check_rate(sample_rate_hz)?;
    let seg = cfg.segment_length;
    if samples.len() < seg {
        return Err(Error::Input(format!(
            "insufficient data: {} samples is shorter than one Welch segment of {seg}",
            samples.len()
        )));
    }
    let window = match cfg.window {
        WindowKind::Hann => hann_periodic(seg),
    };
    let window_energy: f64 = window.iter().map(|w| w * w).sum();
    let step = cfg.step();
    let n_segments = (samples.len() - seg) / step + 1;

    let mut planner = FftPlanner::new();
    let mut acc = vec![0.0; seg / 2 + 1];
    let mut buf = vec![0.0; seg];
    for s in 0..n_segments {
        let chunk = &samples[s * step..s * step + seg];
        let offset = match cfg.detrend {
            Detrend::Constant => chunk.iter().sum::<f64>() / seg as f64,
            Detrend::None => 0.0,
        };
        for ((b, &x), &w) in buf.iter_mut().zip(chunk).zip(&window) {
            *b = (x - offset) * w;
        }
        let p = one_sided_density(&mut planner, &buf, sample_rate_hz, window_energy);
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    for a in &mut acc {
        *a /= n_segments as f64;
    }
    Ok(PsdEstimate {
        frequencies_hz: frequencies(seg, sample_rate_hz),
        power_density: acc,
        resolution_hz: sample_rate_hz / seg as f64,
    })
}

/// Single full-length periodogram of the mean-removed record (rectangular
/// window), scaled like [`welch_psd`].
pub fn fft_power_spectrum(samples: &[f64], sample_rate_hz: f64) -> Result<PsdEstimate> {
    check_rate(sample_rate_hz)?;
    let n = samples.len();
    if n < 2 {
        return Err(Error::Input(format!("FFT spectrum needs at least 2 samples, got {n}")));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = samples.iter().map(|x| x - mean).collect();
    let mut planner = FftPlanner::new();
    Ok(PsdEstimate {
        frequencies_hz: frequencies(n, sample_rate_hz),
        power_density: one_sided_density(&mut planner, &centered, sample_rate_hz, n as f64),
        resolution_hz: sample_rate_hz / n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandName {
    Delta,
    Theta,
    Alpha,
    Beta,
}

impl fmt::Display for BandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BandName::Delta => "delta",
            BandName::Theta => "theta",
            BandName::Alpha => "alpha",
            BandName::Beta => "beta",
        })
    }
}

/// Half-open frequency interval `[low_hz, high_hz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyBand {
    pub name: BandName,
    pub low_hz: f64,
    pub high_hz: f64,
}

impl FrequencyBand {
    pub const DELTA: FrequencyBand = FrequencyBand { name: BandName::Delta, low_hz: 0.5, high_hz: 4.0 };
    pub const THETA: FrequencyBand = FrequencyBand { name: BandName::Theta, low_hz: 4.0, high_hz: 8.0 };
    pub const ALPHA: FrequencyBand = FrequencyBand { name: BandName::Alpha, low_hz: 8.0, high_hz: 13.0 };
    pub const BETA: FrequencyBand = FrequencyBand { name: BandName::Beta, low_hz: 13.0, high_hz: 30.0 };

    /// Delta, theta, alpha, beta in ascending order.
    pub const CANONICAL: [FrequencyBand; 4] = [Self::DELTA, Self::THETA, Self::ALPHA, Self::BETA];

    pub fn contains(&self, freq_hz: f64) -> bool {
        self.low_hz <= freq_hz && freq_hz < self.high_hz
    }
}

/// Rectangle-rule integral of the PSD over the bins inside `band`.
pub fn band_power(psd: &PsdEstimate, band: &FrequencyBand) -> Result<f64> {
    if band.low_hz < 0.0 || band.high_hz <= band.low_hz || band.high_hz > psd.max_frequency() {
        return Err(Error::Input(format!(
            "band {} [{}, {}) Hz lies outside the spectrum [0, {}] Hz",
            band.name,
            band.low_hz,
            band.high_hz,
            psd.max_frequency()
        )));
    }
    let mut bins = 0usize;
    let mut sum = 0.0;
    for (&f, &p) in psd.frequencies_hz.iter().zip(&psd.power_density) {
        if band.contains(f) {
            bins += 1;
            sum += p;
        }
    }
    if bins == 0 {
        return Err(Error::InsufficientResolution {
            band: band.name.to_string(),
            low_hz: band.low_hz,
            high_hz: band.high_hz,
            resolution_hz: psd.resolution_hz,
        });
    }
    Ok(sum * psd.resolution_hz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(amp: f64, freq: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| amp * (2.0 * PI * freq * i as f64 / fs).sin()).collect()
    }

    #[test]
    fn welch_frequency_grid_is_one_sided() {
        let psd = welch_psd(&tone(1.0, 10.0, 250.0, 2500), 250.0, &WelchConfig::default()).unwrap();
        assert_eq!(psd.frequencies_hz.len(), 129);
        assert_eq!(psd.frequencies_hz[0], 0.0);
        assert_eq!(psd.max_frequency(), 125.0);
        assert!((psd.resolution_hz - 250.0 / 256.0).abs() < 1e-15);
        assert!(psd.power_density.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn welch_constant_signal_is_annihilated() {
        let c = 3.7;
        let psd = welch_psd(&[c; 1000], 250.0, &WelchConfig::default()).unwrap();
        assert!(psd.power_density.iter().all(|&p| p <= 1e-12 * c * c));
    }

    #[test]
    fn welch_without_detrend_keeps_dc() {
        let cfg = WelchConfig {
            detrend: Detrend::None,
            ..WelchConfig::default()
        };
        let psd = welch_psd(&[2.0; 512], 250.0, &cfg).unwrap();
        assert!(psd.power_density[0] > 0.0);
    }

    #[test]
    fn welch_rejects_short_signal_and_bad_config() {
        assert!(matches!(
            welch_psd(&[0.0; 255], 250.0, &WelchConfig::default()),
            Err(Error::Input(_))
        ));
        let bad = WelchConfig {
            overlap_fraction: 1.0,
            ..WelchConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let tiny = WelchConfig {
            segment_length: 4,
            ..WelchConfig::default()
        };
        assert!(matches!(tiny.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn overlap_is_floored() {
        let cfg = WelchConfig {
            segment_length: 255,
            overlap_fraction: 0.5,
            ..WelchConfig::default()
        };
        assert_eq!(cfg.overlap_samples(), 127);
        assert_eq!(cfg.step(), 128);
    }

    #[test]
    fn fft_of_zero_signal_is_zero() {
        let psd = fft_power_spectrum(&[0.0; 64], 128.0).unwrap();
        assert!(psd.power_density.iter().all(|&p| p == 0.0));
        assert!(fft_power_spectrum(&[1.0], 128.0).is_err());
    }

    #[test]
    fn odd_length_fft_doubles_last_bin() {
        // 5 Hz on a 9-point grid at fs 9: bin 5 does not exist, use bin 4.
        let x = tone(1.0, 4.0, 9.0, 9);
        let psd = fft_power_spectrum(&x, 9.0).unwrap();
        assert_eq!(psd.frequencies_hz.len(), 5);
        assert!((psd.total_power() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn band_power_zero_psd_and_errors() {
        let psd = PsdEstimate {
            frequencies_hz: (0..=128).map(|k| k as f64 * 250.0 / 256.0).collect(),
            power_density: vec![0.0; 129],
            resolution_hz: 250.0 / 256.0,
        };
        for band in FrequencyBand::CANONICAL {
            assert_eq!(band_power(&psd, &band).unwrap(), 0.0);
        }
        let narrow = FrequencyBand {
            name: BandName::Alpha,
            low_hz: 10.0,
            high_hz: 10.5,
        };
        assert!(matches!(band_power(&psd, &narrow), Err(Error::InsufficientResolution { .. })));
        let outside = FrequencyBand {
            name: BandName::Beta,
            low_hz: 100.0,
            high_hz: 200.0,
        };
        assert!(matches!(band_power(&psd, &outside), Err(Error::Input(_))));
    }

    #[test]
    fn canonical_bands_are_disjoint_and_ascending() {
        for pair in FrequencyBand::CANONICAL.windows(2) {
            assert_eq!(pair[0].high_hz, pair[1].low_hz);
            assert!(pair[0].low_hz < pair[0].high_hz);
        }
        assert!(!FrequencyBand::DELTA.contains(4.0));
        assert!(FrequencyBand::THETA.contains(4.0));
    }
}
