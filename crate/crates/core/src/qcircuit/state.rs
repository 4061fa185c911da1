use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RotationAxis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlledKind {
    Cnot,
    Cz,
}

/// Dense statevector over `n` qubits. Qubit `q` is bit `q` of the amplitude
/// index (little-endian).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// `|0…0⟩` on `n_qubits` qubits.
pub fn zero_state(n_qubits: usize) -> Result<StateVector> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::Input(format!(
            "register size {n_qubits} outside the supported range 1..={MAX_QUBITS}"
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector { n_qubits, amplitudes })
}

impl StateVector {
    /// Wraps caller-provided amplitudes; the length must be a power of two
    /// and the vector must be normalized to within `1e-10`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(Error::Input(format!("{len} amplitudes do not form a supported register")));
        }
        let state = Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        };
        if (state.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Input(format!("state is not normalized (norm {})", state.norm())));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit < self.n_qubits {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "qubit index {qubit} out of range for a {}-qubit register",
                self.n_qubits
            )))
        }
    }

    /// Applies `exp(-i·angle·P/2)` for `P` the Pauli along `axis`.
    pub fn apply_rotation(&mut self, axis: RotationAxis, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let (s, c) = (angle / 2.0).sin_cos();
        let zero = Complex64::new(0.0, 0.0);
        // [[m00, m01], [m10, m11]] acting on (|0⟩, |1⟩) of the target qubit.
        let (m00, m01, m10, m11) = match axis {
            RotationAxis::X => (Complex64::new(c, 0.0), Complex64::new(0.0, -s), Complex64::new(0.0, -s), Complex64::new(c, 0.0)),
            RotationAxis::Y => (Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0)),
            RotationAxis::Z => (Complex64::new(c, -s), zero, zero, Complex64::new(c, s)),
        };
        let mask = 1usize << qubit;
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | mask]);
                self.amplitudes[i] = m00 * a0 + m01 * a1;
                self.amplitudes[i | mask] = m10 * a0 + m11 * a1;
            }
        }
        Ok(())
    }

    pub fn apply_controlled(&mut self, kind: ControlledKind, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::Input(format!("control and target are both qubit {control}")));
        }
        let (cm, tm) = (1usize << control, 1usize << target);
        for i in 0..self.amplitudes.len() {
            if i & cm == 0 {
                continue;
            }
            match kind {
                ControlledKind::Cnot => {
                    if i & tm == 0 {
                        self.amplitudes.swap(i, i | tm);
                    }
                }
                ControlledKind::Cz => {
                    if i & tm != 0 {
                        self.amplitudes[i] = -self.amplitudes[i];
                    }
                }
            }
        }
        Ok(())
    }

    /// `⟨Z_qubit⟩ = Σ_k ±|a_k|²`, positive where the qubit's bit is 0.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| if k & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum())
    }

    /// `⟨Z_q⟩` for every qubit in index order.
    pub fn expectations_z(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_qubits];
        for (k, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (q, o) in out.iter_mut().enumerate() {
                if k & (1 << q) == 0 {
                    *o += p;
                } else {
                    *o -= p;
                }
            }
        }
        out
    }
}
