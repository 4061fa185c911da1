//! Encode one standardized band-power vector into 4 qubits, run the layered
//! ansatz and read out the Z expectations. Prints the gate list the CLI's
//! --dump-circuit flag writes.
//!
//! cargo run --example quantum_circuit

use qeeg::dsp::BandPowerVector;
use qeeg::qcircuit::{
    build_ansatz, encode_features, format_gate_list, quantum_forward, run_circuit, zero_state, AnsatzSpec,
    EncodingSpec, Entanglement, ParameterVector,
};

fn main() -> qeeg::Result<()> {
    let z = BandPowerVector::standardized([-0.3, 0.1, 1.4, -1.1])?;
    let encoding = EncodingSpec::default();
    let ansatz = AnsatzSpec::default();
    let params = ParameterVector::new((0..ansatz.n_params()).map(|i| 0.05 * i as f64 - 0.6).collect())?;

    let mut gates = encode_features(&z, &encoding)?;
    gates.extend(build_ansatz(&params, &ansatz)?);
    println!("{} gates ({} trainable):", gates.len(), params.len());
    print!("{}", format_gate_list(&gates));

    let state = run_circuit(&gates, &zero_state(4)?)?;
    println!("\nnorm: {:.15}", state.norm());
    println!("<Z>:  {:?}", state.expectations_z());

    for entanglement in [Entanglement::AllPairs, Entanglement::Ring] {
        let spec = AnsatzSpec { entanglement, ..ansatz };
        let q = quantum_forward(&z, &params, &encoding, &spec)?;
        println!("{entanglement:?}: {q:.4?}");
    }
    Ok(())
}
