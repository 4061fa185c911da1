use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::state::{zero_state, ControlledKind, RotationAxis, StateVector};
use crate::dsp::BandPowerVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Rotation {
        axis: RotationAxis,
        qubit: usize,
        angle: f64,
        /// Index into the trainable parameter vector, if the angle is trainable.
        param_index: Option<usize>,
    },
    Controlled {
        kind: ControlledKind,
        control: usize,
        target: usize,
    },
}

impl GateOp {
    pub fn rotation(axis: RotationAxis, qubit: usize, angle: f64) -> Self {
        GateOp::Rotation {
            axis,
            qubit,
            angle,
            param_index: None,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp::Controlled {
            kind: ControlledKind::Cnot,
            control,
            target,
        }
    }

    pub fn cz(control: usize, target: usize) -> Self {
        GateOp::Controlled {
            kind: ControlledKind::Cz,
            control,
            target,
        }
    }

    pub fn param_index(&self) -> Option<usize> {
        match self {
            GateOp::Rotation { param_index, .. } => *param_index,
            GateOp::Controlled { .. } => None,
        }
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        match *self {
            GateOp::Rotation { axis, qubit, angle, .. } => state.apply_rotation(axis, qubit, angle),
            GateOp::Controlled { kind, control, target } => state.apply_controlled(kind, control, target),
        }
    }
}

/// One gate per line: `RY q0 1.5708`, `CNOT q0 q1`.
impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::Rotation { axis, qubit, angle, .. } => {
                let name = match axis {
                    RotationAxis::X => "RX",
                    RotationAxis::Y => "RY",
                    RotationAxis::Z => "RZ",
                };
                write!(f, "{name} q{qubit} {angle:.4}")
            }
            GateOp::Controlled { kind, control, target } => {
                let name = match kind {
                    ControlledKind::Cnot => "CNOT",
                    ControlledKind::Cz => "CZ",
                };
                write!(f, "{name} q{control} q{target}")
            }
        }
    }
}

pub fn format_gate_list(gates: &[GateOp]) -> String {
    gates.iter().map(|g| format!("{g}\n")).collect()
}

/// Applies `gates` in order to a copy of `initial`.
pub fn run_circuit(gates: &[GateOp], initial: &StateVector) -> Result<StateVector> {
    let mut state = initial.clone();
    for g in gates {
        g.apply(&mut state)?;
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EncodingScheme {
    /// `RY(π·sigmoid(z_i))` then `RZ(z_i − z_{i+1 mod n})` on qubit `i`.
    #[default]
    AmplitudePhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub scheme: EncodingScheme,
    pub n_features: usize,
}

impl Default for EncodingSpec {
    fn default() -> Self {
        Self {
            scheme: EncodingScheme::AmplitudePhase,
            n_features: 4,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Data-dependent encoding gates for qubits 0..4 = delta, theta, alpha, beta.
/// Magnitudes set the `RY` angle, neighbouring-band differences set the `RZ` phase.
pub fn encode_features(features: &BandPowerVector, spec: &EncodingSpec) -> Result<Vec<GateOp>> {
    if !features.is_standardized() {
        return Err(Error::Logic("quantum encoding expects standardized features".into()));
    }
    if spec.n_features != 4 {
        return Err(Error::Config(format!(
            "encoding is defined for the 4 band-power features, got n_features = {}",
            spec.n_features
        )));
    }
    let z = features.values();
    let n = z.len();
    let mut gates = Vec::with_capacity(2 * n);
    match spec.scheme {
        EncodingScheme::AmplitudePhase => {
            for i in 0..n {
                gates.push(GateOp::rotation(RotationAxis::Y, i, PI * sigmoid(z[i])));
                gates.push(GateOp::rotation(RotationAxis::Z, i, z[i] - z[(i + 1) % n]));
            }
        }
    }
    Ok(gates)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    /// `CNOT(i→j)` for every `i < j`, lexicographic.
    #[default]
    AllPairs,
    /// `CNOT(i→i+1)` and a closing `CNOT(n-1→0)`.
    Ring,
}

impl std::str::FromStr for Entanglement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_pairs" | "all-pairs" => Ok(Entanglement::AllPairs),
            "ring" => Ok(Entanglement::Ring),
            other => Err(Error::Config(format!("unknown entanglement '{other}' (all_pairs|ring)"))),
        }
    }
}

impl Entanglement {
    pub fn pairs(&self, n_qubits: usize) -> Vec<(usize, usize)> {
        match self {
            Entanglement::AllPairs => (0..n_qubits)
                .flat_map(|i| (i + 1..n_qubits).map(move |j| (i, j)))
                .collect(),
            Entanglement::Ring if n_qubits < 2 => Vec::new(),
            Entanglement::Ring => (0..n_qubits).map(|i| (i, (i + 1) % n_qubits)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub depth: usize,
    pub entanglement: Entanglement,
}

impl Default for AnsatzSpec {
    /// 4 qubits, 3 layers, all-pairs CNOT entanglement.
    fn default() -> Self {
        Self {
            n_qubits: 4,
            depth: 3,
            entanglement: Entanglement::AllPairs,
        }
    }
}

impl AnsatzSpec {
    pub fn params_per_layer(&self) -> usize {
        2 * self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.depth * self.params_per_layer()
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=super::MAX_QUBITS).contains(&self.n_qubits) {
            return Err(Error::Config(format!("ansatz qubit count {} unsupported", self.n_qubits)));
        }
        if self.depth < 1 {
            return Err(Error::Config("ansatz depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Trainable ansatz angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("circuit parameters must be finite".into()));
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Layered ansatz: per layer `RX` then `RY` on each qubit, then the
/// entanglement block. Parameter `2·(layer·n + i)` drives the `RX` on qubit
/// `i`, the next index its `RY`.
pub fn build_ansatz(params: &ParameterVector, spec: &AnsatzSpec) -> Result<Vec<GateOp>> {
    spec.validate()?;
    if params.len() != spec.n_params() {
        return Err(Error::Shape(format!(
            "ansatz expects {} parameters, got {}",
            spec.n_params(),
            params.len()
        )));
    }
    let n = spec.n_qubits;
    let pairs = spec.entanglement.pairs(n);
    let mut gates = Vec::with_capacity(spec.depth * (2 * n + pairs.len()));
    let p = params.values();
    for layer in 0..spec.depth {
        for q in 0..n {
            let base = layer * spec.params_per_layer() + 2 * q;
            for (offset, axis) in [(0, RotationAxis::X), (1, RotationAxis::Y)] {
                gates.push(GateOp::Rotation {
                    axis,
                    qubit: q,
                    angle: p[base + offset],
                    param_index: Some(base + offset),
                });
            }
        }
        gates.extend(pairs.iter().map(|&(c, t)| GateOp::cnot(c, t)));
    }
    Ok(gates)
}

/// Encoding followed by the ansatz on `|0000⟩`, read out as `⟨Z_q⟩` per qubit.
pub fn quantum_forward(
    features: &BandPowerVector,
    params: &ParameterVector,
    encoding: &EncodingSpec,
    ansatz: &AnsatzSpec,
) -> Result<Vec<f64>> {
    let encoded = encoded_state(features, encoding, ansatz)?;
    let state = run_circuit(&build_ansatz(params, ansatz)?, &encoded)?;
    Ok(state.expectations_z())
}

pub(crate) fn encoded_state(
    features: &BandPowerVector,
    encoding: &EncodingSpec,
    ansatz: &AnsatzSpec,
) -> Result<StateVector> {
    if encoding.n_features != ansatz.n_qubits {
        return Err(Error::Config(format!(
            "encoding has {} features but the ansatz has {} qubits",
            encoding.n_features, ansatz.n_qubits
        )));
    }
    run_circuit(&encode_features(features, encoding)?, &zero_state(ansatz.n_qubits)?)
}
