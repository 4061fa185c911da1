//! From a raw multichannel trial to four band powers: Welch and single-FFT
//! spectra of a three-tone signal, band integration, then standardization
//! across a small batch of trials.
//!
//! cargo run --example band_powers

use std::f64::consts::PI;

use qeeg::dsp::{
    apply_standardizer, band_power, fft_power_spectrum, fit_standardizer, welch_psd, Channel, FeatureExtractor,
    FilterSpec, FrequencyBand, SignalRecord, SpectralMethod, WelchConfig,
};

fn tones(fs: f64, n: usize, parts: &[(f64, f64)]) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            parts.iter().map(|&(f, a)| a * (2.0 * PI * f * t).sin()).sum()
        })
        .collect()
}

fn main() -> qeeg::Result<()> {
    let fs = 250.0;
    let x = tones(fs, 2500, &[(3.0, 1.0), (10.0, 2.0), (22.0, 0.5)]);

    let welch = welch_psd(&x, fs, &WelchConfig::default())?;
    let fft = fft_power_spectrum(&x, fs)?;
    println!("resolution: Welch {:.4} Hz, FFT {:.4} Hz", welch.resolution_hz, fft.resolution_hz);
    println!("total power (expected 0.5 + 2 + 0.125 = 2.625): Welch {:.4}, FFT {:.4}", welch.total_power(), fft.total_power());
    println!("\nband     Welch      FFT   expected");
    let expected = [0.5, 0.0, 2.0, 0.125];
    for (band, e) in FrequencyBand::CANONICAL.iter().zip(expected) {
        println!(
            "{:<6} {:>7.4}  {:>7.4}  {:>7.4}",
            band.name.to_string(),
            band_power(&welch, band)?,
            band_power(&fft, band)?,
            e
        );
    }

    // A batch of two-channel trials whose alpha amplitude grows.
    let extractor = FeatureExtractor::new(FilterSpec::default(), WelchConfig::default(), SpectralMethod::Welch)?;
    let mut raw = Vec::new();
    for k in 0..5 {
        let alpha = 1.0 + k as f64;
        let channels = ["c3", "c4"]
            .iter()
            .map(|name| Channel {
                name: name.to_string(),
                samples: tones(fs, 1000, &[(2.0, 1.0), (6.0, 1.0), (10.0, alpha), (20.0, 1.0)]),
            })
            .collect();
        let record = SignalRecord::new(format!("t{k}"), fs, channels, None)?;
        raw.push(extractor.extract(&record)?);
    }
    let stats = fit_standardizer(&raw)?;
    println!("\nstandardizer mean {:?}", stats.mean);
    for (k, v) in raw.iter().enumerate() {
        let z = apply_standardizer(&stats, v)?;
        println!("trial {k}: raw alpha {:>7.3} -> z {:+.3}", v.alpha(), z.alpha());
    }
    Ok(())
}
