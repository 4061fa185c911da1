//! Independent reference implementations shared by the integration tests.
//! Each one is deliberately naive and written from the defining formula, not
//! from the library code it checks.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qeeg::dsp::BandPowerVector;
use qeeg::neural::{Activation, Network};
use qeeg::qcircuit::{ControlledKind, GateOp, RotationAxis};

type CMatrix = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `exp(-iθP/2)` for P ∈ {X, Y, Z}.
fn rotation_2x2(axis: RotationAxis, theta: f64) -> CMatrix {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let m = match axis {
        RotationAxis::X => [c(co, 0.0), c(0.0, -si), c(0.0, -si), c(co, 0.0)],
        RotationAxis::Y => [c(co, 0.0), c(-si, 0.0), c(si, 0.0), c(co, 0.0)],
        RotationAxis::Z => [c(co, -si), c(0.0, 0.0), c(0.0, 0.0), c(co, si)],
    };
    CMatrix::from_row_slice(2, 2, &m)
}

/// Full `2^n × 2^n` matrix of one gate. Basis index bit `q` is qubit `q`, so
/// the operator on qubit `q` sits at Kronecker position `n-1-q` from the left.
pub fn gate_unitary(gate: &GateOp, n: usize) -> CMatrix {
    let dim = 1 << n;
    match *gate {
        GateOp::Rotation { axis, qubit, angle, .. } => {
            let mut full = CMatrix::identity(1, 1);
            for q in (0..n).rev() {
                let factor = if q == qubit {
                    rotation_2x2(axis, angle)
                } else {
                    CMatrix::identity(2, 2)
                };
                full = full.kronecker(&factor);
            }
            full
        }
        GateOp::Controlled { kind, control, target } => {
            let mut m = CMatrix::zeros(dim, dim);
            for col in 0..dim {
                let control_set = col >> control & 1 == 1;
                match kind {
                    ControlledKind::Cnot => {
                        let row = if control_set { col ^ (1 << target) } else { col };
                        m[(row, col)] = c(1.0, 0.0);
                    }
                    ControlledKind::Cz => {
                        let sign = if control_set && col >> target & 1 == 1 { -1.0 } else { 1.0 };
                        m[(col, col)] = c(sign, 0.0);
                    }
                }
            }
            m
        }
    }
}

/// Product of all gate matrices, applied to `|0…0⟩`.
pub fn dense_circuit_state(gates: &[GateOp], n: usize) -> Vec<Complex64> {
    let dim = 1 << n;
    let mut u = CMatrix::identity(dim, dim);
    for g in gates {
        u = gate_unitary(g, n) * u;
    }
    (0..dim).map(|i| u[(i, 0)]).collect()
}

/// `⟨Z_q⟩ = Σ |a_k|² (1 − 2·bit_q(k))`.
pub fn dense_expectations_z(amplitudes: &[Complex64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|q| {
            amplitudes
                .iter()
                .enumerate()
                .map(|(k, a)| a.norm_sqr() * if k >> q & 1 == 1 { -1.0 } else { 1.0 })
                .sum()
        })
        .collect()
}

/// Neuron-by-neuron forward pass with explicit loops.
pub fn naive_forward(net: &Network, input: &[f64]) -> Vec<f64> {
    let mut x = input.to_vec();
    for layer in net.layers() {
        let mut out = vec![0.0; layer.output_dim()];
        for (j, o) in out.iter_mut().enumerate() {
            let mut s = layer.biases[j];
            for (i, xi) in x.iter().enumerate() {
                s += layer.weights[(j, i)] * xi;
            }
            *o = s;
        }
        x = match layer.activation {
            Activation::Relu => out.iter().map(|v| v.max(0.0)).collect(),
            Activation::None => out,
            Activation::Softmax => {
                let m = out.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = out.iter().map(|v| (v - m).exp()).collect();
                let s: f64 = e.iter().sum();
                e.iter().map(|v| v / s).collect()
            }
        };
    }
    x
}

/// One-sided Welch PSD from direct O(N²) DFTs of each Hann-windowed,
/// mean-removed segment.
pub fn direct_welch(x: &[f64], fs: f64, nperseg: usize, noverlap: usize) -> (Vec<f64>, Vec<f64>) {
    let w: Vec<f64> = (0..nperseg).map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / nperseg as f64).cos()).collect();
    let s2: f64 = w.iter().map(|v| v * v).sum();
    let n_bins = nperseg / 2 + 1;
    let step = nperseg - noverlap;
    let mut acc = vec![0.0; n_bins];
    let mut count = 0;
    let mut start = 0;
    while start + nperseg <= x.len() {
        let seg = &x[start..start + nperseg];
        let mean = seg.iter().sum::<f64>() / nperseg as f64;
        for (k, a) in acc.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in seg.iter().enumerate() {
                let ph = -2.0 * PI * (k * t) as f64 / nperseg as f64;
                let y = (v - mean) * w[t];
                re += y * ph.cos();
                im += y * ph.sin();
            }
            let mut p = (re * re + im * im) / (fs * s2);
            let nyquist = nperseg % 2 == 0 && k == nperseg / 2;
            if k != 0 && !nyquist {
                p *= 2.0;
            }
            *a += p;
        }
        count += 1;
        start += step;
    }
    let freqs = (0..n_bins).map(|k| k as f64 * fs / nperseg as f64).collect();
    (freqs, acc.iter().map(|v| v / count as f64).collect())
}

/// Σ P·Δf over bins with `low ≤ f < high`.
pub fn integrate(freqs: &[f64], psd: &[f64], low: f64, high: f64) -> f64 {
    let df = freqs[1] - freqs[0];
    freqs
        .iter()
        .zip(psd)
        .filter(|(f, _)| **f >= low && **f < high)
        .map(|(_, p)| p * df)
        .sum()
}

/// Central difference of `f` in every coordinate of `x`.
pub fn central_differences(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// |a − b| / max(|a|, |b|, floor): relative error that stays meaningful for
/// coordinates that are essentially zero.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
pub fn mann_whitney_auc(scores: &[f64], positive: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        if !positive[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if positive[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

pub fn raw(values: [f64; 4]) -> BandPowerVector {
    BandPowerVector::raw(values).unwrap()
}
