//! Exact statevector simulation of the hybrid model's quantum layer.
//!
//! A forward pass prepares `|0000⟩`, applies the data encoding (one `RY` and
//! one `RZ` per band), then `depth` layers of trainable `RX`/`RY` rotations
//! each followed by a CNOT entanglement block, and reads out `⟨Z_q⟩` for every
//! qubit. Gradients with respect to the trainable angles use the two-term
//! parameter-shift rule, which is exact for `exp(-iθP/2)` gates.

mod circuit;
mod gradient;
mod state;

pub use circuit::{
    build_ansatz, encode_features, format_gate_list, quantum_forward, run_circuit, AnsatzSpec, EncodingScheme,
    EncodingSpec, Entanglement, GateOp, ParameterVector,
};
pub use gradient::{circuit_parameter_shift, parameter_shift_gradient};
pub use state::{zero_state, ControlledKind, RotationAxis, StateVector, MAX_QUBITS};
