use std::f64::consts::FRAC_PI_2;

use super::circuit::{build_ansatz, encoded_state, run_circuit, AnsatzSpec, EncodingSpec, GateOp, ParameterVector};
use super::state::StateVector;
use crate::dsp::BandPowerVector;
use crate::error::{Error, Result};

/// Vector-Jacobian product `Σ_i upstream_i · ∂⟨Z_i⟩/∂θ_j` for every trainable
/// gate in `gates`, by the two-term shift rule.
///
/// Each trainable gate occurrence is evaluated at `θ ± π/2`; contributions of
/// gates sharing a `param_index` are summed. Costs two circuit runs per
/// trainable gate.
pub fn circuit_parameter_shift(
    gates: &[GateOp],
    n_params: usize,
    initial: &StateVector,
    upstream: &[f64],
) -> Result<Vec<f64>> {
    if upstream.len() != initial.n_qubits() {
        return Err(Error::Shape(format!(
            "upstream gradient has {} entries for {} readout qubits",
            upstream.len(),
            initial.n_qubits()
        )));
    }
    let mut grad = vec![0.0; n_params];
    let mut shifted = gates.to_vec();
    for (pos, gate) in gates.iter().enumerate() {
        let GateOp::Rotation {
            angle,
            param_index: Some(j),
            ..
        } = *gate
        else {
            continue;
        };
        if j >= n_params {
            return Err(Error::Shape(format!("gate parameter index {j} exceeds {n_params} parameters")));
        }
        let mut eval = |delta: f64| -> Result<Vec<f64>> {
            if let GateOp::Rotation { angle: a, .. } = &mut shifted[pos] {
                *a = angle + delta;
            }
            Ok(run_circuit(&shifted, initial)?.expectations_z())
        };
        let plus = eval(FRAC_PI_2)?;
        let minus = eval(-FRAC_PI_2)?;
        shifted[pos] = *gate;
        grad[j] += upstream
            .iter()
            .zip(plus.iter().zip(&minus))
            .map(|(u, (p, m))| u * (p - m) / 2.0)
            .sum::<f64>();
    }
    Ok(grad)
}

/// Gradient of `upstream · ⟨Z⟩` with respect to every ansatz angle.
pub fn parameter_shift_gradient(
    features: &BandPowerVector,
    params: &ParameterVector,
    encoding: &EncodingSpec,
    ansatz: &AnsatzSpec,
    upstream: &[f64],
) -> Result<Vec<f64>> {
    let encoded = encoded_state(features, encoding, ansatz)?;
    let gates = build_ansatz(params, ansatz)?;
    circuit_parameter_shift(&gates, params.len(), &encoded, upstream)
}
