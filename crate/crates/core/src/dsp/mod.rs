//! Raw EEG to standardized band-power features.
//!
//! The pipeline per trial is: zero-phase Butterworth bandpass on every
//! channel, a one-sided PSD (Welch or a single FFT periodogram), integration
//! over the delta/theta/alpha/beta bands, averaging across channels. The
//! standardizer is fitted separately on a training set and applied per vector.

mod features;
mod filter;
mod spectrum;
mod standardize;

pub use features::{
    channel_band_powers, extract_band_features, BandPowerVector, Channel, ChannelReduction, FeatureExtractor,
    SignalRecord, SpectralMethod,
};
pub use filter::{apply_zero_phase_filter, design_butterworth_bandpass, FilterSpec, IirCoefficients};
pub use spectrum::{
    band_power, fft_power_spectrum, welch_psd, BandName, Detrend, FrequencyBand, PsdEstimate, WelchConfig, WindowKind,
};
pub use standardize::{apply_standardizer, fit_standardizer, StandardizerStats};
