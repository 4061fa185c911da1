//! Parameter-shift gradients of the quantum layer against central finite
//! differences, for a weighted sum of the four Z readouts.
//!
//! cargo run --example parameter_shift

use qeeg::dsp::BandPowerVector;
use qeeg::qcircuit::{parameter_shift_gradient, quantum_forward, AnsatzSpec, EncodingSpec, ParameterVector};

fn main() -> qeeg::Result<()> {
    let z = BandPowerVector::standardized([0.8, -0.2, 0.5, -1.3])?;
    let encoding = EncodingSpec::default();
    let ansatz = AnsatzSpec::default();
    let theta: Vec<f64> = (0..ansatz.n_params()).map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.5).collect();
    let upstream = [0.7, -1.2, 0.4, 2.0];

    let objective = |t: &[f64]| -> qeeg::Result<f64> {
        let q = quantum_forward(&z, &ParameterVector::new(t.to_vec())?, &encoding, &ansatz)?;
        Ok(q.iter().zip(upstream).map(|(a, b)| a * b).sum())
    };

    let grad = parameter_shift_gradient(&z, &ParameterVector::new(theta.clone())?, &encoding, &ansatz, &upstream)?;
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    println!("param   shift-rule    finite-diff");
    for (i, g) in grad.iter().enumerate() {
        let mut plus = theta.clone();
        let mut minus = theta.clone();
        plus[i] += h;
        minus[i] -= h;
        let fd = (objective(&plus)? - objective(&minus)?) / (2.0 * h);
        worst = worst.max((g - fd).abs());
        println!("{i:>5}  {g:>+12.8}  {fd:>+12.8}");
    }
    println!("largest absolute difference: {worst:.2e}");
    Ok(())
}
