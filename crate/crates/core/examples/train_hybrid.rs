//! Train the hybrid model on synthetic band powers and save it.
//!
//! cargo run --release --example train_hybrid -- [seed] [all_pairs|ring]

use qeeg::dsp::{FeatureExtractor, FilterSpec, SpectralMethod, WelchConfig};
use qeeg::hybrid::{fit, load_model, save_model, LabeledDataset, TrainingConfig};
use qeeg::io::{generate_synthetic_eeg, SynthSpec};
use qeeg::qcircuit::AnsatzSpec;

fn main() -> qeeg::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(Ok(0), |s| s.parse()).expect("seed must be an integer");
    let entanglement = args.next().map_or(Ok(Default::default()), |s| s.parse())?;

    let (records, labels) = generate_synthetic_eeg(&SynthSpec {
        seed: 7,
        ..SynthSpec::default()
    })?;
    let extractor = FeatureExtractor::new(FilterSpec::default(), WelchConfig::default(), SpectralMethod::Welch)?;
    let features = records.iter().map(|r| extractor.extract(r)).collect::<qeeg::Result<Vec<_>>>()?;
    let data = LabeledDataset::new(features, labels)?;

    let cfg = TrainingConfig {
        seed,
        ansatz: AnsatzSpec {
            entanglement,
            ..AnsatzSpec::default()
        },
        ..TrainingConfig::default()
    };
    let (model, report) = fit(&data, &cfg)?;
    print!("{report}");

    let path = std::env::temp_dir().join(format!("qeeg-model-{seed}.json"));
    save_model(&model, &path)?;
    let reloaded = load_model(&path)?;
    println!("saved to {} (reload identical: {})", path.display(), reloaded == model);
    Ok(())
}
