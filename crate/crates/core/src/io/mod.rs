//! File formats, the synthetic EEG generator and pipeline configuration.

mod config;
mod csv;
mod synth;

pub use self::config::PipelineConfig;
pub use self::csv::{
    load_eeg_csv, read_feature_csv, write_eeg_csv, write_feature_csv, write_feature_rows, FeatureTable, LoadedEeg, has_time_column,
    FEATURE_COLUMNS, JITTER_TOLERANCE,
};
pub use self::synth::{generate_synthetic_eeg, ClassProfile, SynthSpec, Tone};
