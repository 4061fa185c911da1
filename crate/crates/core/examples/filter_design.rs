//! Design the default 0.5-45 Hz bandpass and inspect it: coefficients,
//! magnitude response, pole radii, and what zero-phase filtering does to a
//! 10 Hz tone buried under 60 Hz mains hum.
//!
//! cargo run --example filter_design

use std::f64::consts::PI;

use qeeg::dsp::{apply_zero_phase_filter, design_butterworth_bandpass, FilterSpec};

fn main() -> qeeg::Result<()> {
    let spec = FilterSpec::default();
    let coeffs = design_butterworth_bandpass(&spec)?;
    println!("{} taps, stable: {}", coeffs.ntaps(), coeffs.is_stable());
    println!("b = {:?}", coeffs.numerator());
    println!("a = {:?}", coeffs.denominator());

    println!("\n  freq Hz   |H| single   |H|^2 zero-phase");
    for f in [0.1, 0.5, 1.0, 4.74, 10.0, 30.0, 45.0, 50.0, 60.0, 100.0] {
        let m = coeffs.magnitude(f, spec.sample_rate_hz);
        println!("{f:>9.2}   {m:>10.5}   {:>10.5}", m * m);
    }
    let max_radius = coeffs.poles().iter().map(|p| p.norm()).fold(0.0, f64::max);
    println!("\nlargest pole radius: {max_radius:.5}");

    let fs = spec.sample_rate_hz;
    let x: Vec<f64> = (0..2500)
        .map(|i| {
            let t = i as f64 / fs;
            (2.0 * PI * 10.0 * t).sin() + 2.0 * (2.0 * PI * 60.0 * t).sin()
        })
        .collect();
    let y = apply_zero_phase_filter(&coeffs, &x)?;
    // Compare against the clean tone away from the edges.
    let interior = 500..2000;
    let err: f64 = interior
        .clone()
        .map(|i| (y[i] - (2.0 * PI * 10.0 * i as f64 / fs).sin()).powi(2))
        .sum::<f64>()
        / interior.len() as f64;
    println!("interior RMS deviation from the clean 10 Hz tone: {:.4}", err.sqrt());
    Ok(())
}
