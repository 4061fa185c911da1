//! The `qeeg` command-line driver.
//!
//! Exit codes: 0 on success, 1 for usage and configuration errors, 2 for data
//! errors (unreadable files, shape mismatches, degenerate datasets).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dsp::{BandPowerVector, FeatureExtractor, SpectralMethod};
use crate::error::{Error, Result};
use crate::eval::{roc_curve, EvalReport};
use crate::hybrid::{evaluate_model, fit, load_model, predict_probabilities, save_model, LabeledDataset};
use crate::io::{
    generate_synthetic_eeg, has_time_column, load_eeg_csv, read_feature_csv, write_eeg_csv, write_feature_csv,
    ClassProfile, PipelineConfig, SynthSpec,
};
use crate::qcircuit::{build_ansatz, format_gate_list, Entanglement};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qeeg", version, about = "Hybrid quantum-classical EEG emotion classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate labelled synthetic EEG (eeg.csv and labels.csv in --out).
    Synth(SynthArgs),
    /// Raw EEG CSV to band-power feature CSV.
    Preprocess(PreprocessArgs),
    /// Train a model on a labelled feature CSV.
    Train(TrainArgs),
    /// Evaluate a model on a labelled feature CSV.
    Eval(EvalArgs),
    /// Write the ROC curve of a binary model as CSV.
    Roc(RocArgs),
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// TOML file with flat pipeline keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<PipelineConfig> {
        match &self.config {
            Some(p) => PipelineConfig::load(p),
            None => Ok(PipelineConfig::default()),
        }
    }
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Trials per class.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    classes: usize,
    #[arg(long, default_value_t = 4.0)]
    duration: f64,
    #[arg(long, default_value_t = 250.0)]
    fs: f64,
    #[arg(long, default_value_t = 2)]
    channels: usize,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PreprocessArgs {
    /// Raw EEG CSV.
    #[arg(long)]
    input: PathBuf,
    /// Feature CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Sample rate; overrides the time column.
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long)]
    method: Option<SpectralMethod>,
    #[arg(long)]
    low: Option<f64>,
    #[arg(long)]
    high: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    segment: Option<usize>,
    #[arg(long)]
    overlap: Option<f64>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Labelled feature CSV.
    #[arg(long)]
    features: PathBuf,
    /// Model file to write.
    #[arg(long)]
    model: PathBuf,
    /// Also write the training report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    entanglement: Option<Entanglement>,
    #[arg(long)]
    classes: Option<usize>,
    /// Worker threads for gradients; results are identical for any count.
    #[arg(long)]
    threads: Option<usize>,
    /// Write the trained ansatz as a text gate list.
    #[arg(long)]
    dump_circuit: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Labelled feature CSV.
    #[arg(long)]
    features: PathBuf,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RocArgs {
    #[arg(long)]
    model: PathBuf,
    /// Labelled feature CSV.
    #[arg(long)]
    features: PathBuf,
    /// ROC CSV to write; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run_cli(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_DATA
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Preprocess(a) => preprocess(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Roc(a) => roc(a),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        n_trials_per_class: a.trials,
        duration_s: a.duration,
        sample_rate_hz: a.fs,
        n_channels: a.channels,
        class_profiles: ClassProfile::defaults(a.classes)?,
        noise_sigma: a.noise,
        seed: a.seed,
    };
    let (records, labels) = generate_synthetic_eeg(&spec)?;
    fs::create_dir_all(&a.out)?;
    write_eeg_csv(a.out.join("eeg.csv"), &records)?;
    let mut listing = String::from("trial,label\n");
    for (r, l) in records.iter().zip(&labels) {
        listing.push_str(&format!("{},{l}\n", r.trial_id()));
    }
    fs::write(a.out.join("labels.csv"), listing)?;
    println!("wrote {} trials to {}", records.len(), a.out.display());
    Ok(())
}

fn preprocess(a: PreprocessArgs) -> Result<()> {
    let mut cfg = a.config.load()?;
    if let Some(v) = a.method {
        cfg.method = v;
    }
    if let Some(v) = a.low {
        cfg.low_cut_hz = v;
    }
    if let Some(v) = a.high {
        cfg.high_cut_hz = v;
    }
    if let Some(v) = a.order {
        cfg.filter_order = v;
    }
    if let Some(v) = a.segment {
        cfg.segment_length = v;
    }
    if let Some(v) = a.overlap {
        cfg.overlap_fraction = v;
    }
    if let Some(fs) = a.fs {
        cfg.sample_rate_hz = fs;
    }
    cfg.filter_spec().validate()?;
    cfg.welch().validate()?;
    // --fs wins; otherwise the time column; otherwise the configured rate.
    let override_fs = match a.fs {
        Some(fs) => Some(fs),
        None if has_time_column(&a.input)? => None,
        None => Some(cfg.sample_rate_hz),
    };

    let loaded = load_eeg_csv(&a.input, override_fs)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let Some(first) = loaded.records.first() else {
        return Err(Error::Input("no trials in input".into()));
    };
    let mut filter = cfg.filter_spec();
    filter.sample_rate_hz = first.sample_rate_hz();
    let extractor = FeatureExtractor::new(filter, cfg.welch(), cfg.method)?;
    let features: Vec<BandPowerVector> = loaded
        .records
        .iter()
        .map(|r| extractor.extract(r))
        .collect::<Result<_>>()?;
    let labels: Option<Vec<usize>> = loaded.records.iter().map(|r| r.label()).collect();
    if labels.is_none() && loaded.records.iter().any(|r| r.label().is_some()) {
        return Err(Error::Input("some trials are labelled and others are not".into()));
    }
    write_feature_csv(&a.out, &features, labels.as_deref())?;
    println!("wrote {} feature rows to {}", features.len(), a.out.display());
    Ok(())
}

fn labelled(path: &Path) -> Result<LabeledDataset> {
    let table = read_feature_csv(path)?;
    let labels = table
        .labels
        .ok_or_else(|| Error::Input(format!("{}: no label column", path.display())))?;
    LabeledDataset::new(table.features, labels)
}

fn train(a: TrainArgs) -> Result<()> {
    let mut cfg = a.config.load()?;
    if let Some(v) = a.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = a.batch {
        cfg.batch_size = v;
    }
    if let Some(v) = a.lr {
        cfg.learning_rate = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.depth {
        cfg.depth = v;
    }
    if let Some(v) = a.entanglement {
        cfg.entanglement = v;
    }
    if let Some(v) = a.classes {
        cfg.n_classes = v;
    }
    if let Some(v) = a.threads {
        cfg.threads = v;
    }
    let training = cfg.training();
    training.validate()?;
    let data = labelled(&a.features)?;
    let (model, report) = fit(&data, &training)?;
    save_model(&model, &a.model)?;
    let text = report.to_string();
    if let Some(p) = &a.report {
        fs::write(p, &text)?;
    }
    if let Some(p) = &a.dump_circuit {
        let gates = build_ansatz(model.quantum_params(), model.ansatz())?;
        fs::write(p, format_gate_list(&gates))?;
    }
    print!("{text}");
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let data = labelled(&a.features)?;
    let report: EvalReport = evaluate_model(&model, &data)?;
    if a.json {
        println!("{}", report.to_json());
    } else {
        print!("{report}");
    }
    Ok(())
}

fn roc(a: RocArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    if model.n_classes() != 2 {
        return Err(Error::Shape(format!(
            "ROC export needs a binary model, this one has {} classes",
            model.n_classes()
        )));
    }
    let data = labelled(&a.features)?;
    if let Some(&bad) = data.labels().iter().find(|&&l| l > 1) {
        return Err(Error::Shape(format!("label {bad} in a binary ROC")));
    }
    let probs = predict_probabilities(&model, data.features())?;
    let scores: Vec<f64> = probs.iter().map(|p| p[1]).collect();
    let positive: Vec<bool> = data.labels().iter().map(|&l| l == 1).collect();
    let curve = roc_curve(&scores, &positive)?;
    match &a.out {
        Some(p) => curve.write_csv(fs::File::create(p)?)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            curve.write_csv(&mut stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("qeeg").chain(s.split_whitespace()).map(str::to_string).collect()
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_cli(&argv("frobnicate")), EXIT_USAGE);
        assert_eq!(run_cli(&argv("train --bogus")), EXIT_USAGE);
        assert_eq!(run_cli(&argv("preprocess --input x.csv --out y.csv --method wavelet")), EXIT_USAGE);
    }

    #[test]
    fn invalid_band_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("f.csv");
        let cmd = format!("preprocess --input missing.csv --out {} --low 50 --high 40", out.display());
        assert_eq!(run_cli(&argv(&cmd)), EXIT_USAGE);
    }

    #[test]
    fn missing_input_is_a_data_error() {
        let cmd = "eval --model /nonexistent/m.json --features /nonexistent/f.csv";
        assert_eq!(run_cli(&argv(cmd)), EXIT_DATA);
    }
}
