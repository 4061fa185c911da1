//! Raw EEG and feature CSV formats.
//!
//! Raw files have a header row. An optional `time` column (seconds) must come
//! first; optional `trial` and `label` columns may appear anywhere; every
//! other column is one channel. Without a `trial` column the file is a single
//! trial named after the file stem.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::dsp::{BandPowerVector, Channel, SignalRecord};
use crate::error::{Error, Result};

/// Relative spread of sample spacing above which a warning is emitted.
pub const JITTER_TOLERANCE: f64 = 0.01;

pub const FEATURE_COLUMNS: [&str; 4] = ["delta", "theta", "alpha", "beta"];

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedEeg {
    pub records: Vec<SignalRecord>,
    pub warnings: Vec<String>,
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if let csv::ErrorKind::Io(_) = e.kind() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => return Error::Io(io),
            _ => unreachable!(),
        }
    }
    Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Reads the header and all rows, checking the header exists and every row
/// has the same width. Rows are numbered from 1 for the first data row.
fn read_table(path: &Path) -> Result<(Vec<String>, Vec<csv::StringRecord>)> {
    let file = File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let looks_numeric = header.iter().any(|h| h.parse::<f64>().is_ok());
    if header.iter().all(String::is_empty) || looks_numeric {
        return Err(Error::MissingHeader {
            path: path.to_path_buf(),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                row: i + 1,
                expected: header.len(),
                found: rec.len(),
            });
        }
        rows.push(rec);
    }
    Ok((header, rows))
}

fn parse_cell(path: &Path, row: usize, column: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::NonNumeric {
            path: path.to_path_buf(),
            row,
            column: column.to_string(),
            value: value.to_string(),
        })
}

fn parse_label(path: &Path, row: usize, value: &str) -> Result<usize> {
    value.parse::<usize>().map_err(|_| Error::NonNumeric {
        path: path.to_path_buf(),
        row,
        column: "label".into(),
        value: value.to_string(),
    })
}

struct TrialRows {
    id: String,
    label: Option<usize>,
    times: Vec<f64>,
    channels: Vec<Vec<f64>>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// True when the file's first header field is `time`.
pub fn has_time_column(path: impl AsRef<Path>) -> Result<bool> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?;
    Ok(header.get(0).is_some_and(|h| h.eq_ignore_ascii_case("time")))
}

/// Loads raw EEG. `sample_rate_override` takes precedence over the time column.
pub fn load_eeg_csv(path: impl AsRef<Path>, sample_rate_override: Option<f64>) -> Result<LoadedEeg> {
    let path = path.as_ref();
    let (header, rows) = read_table(path)?;
    let time_col = (header[0].eq_ignore_ascii_case("time")).then_some(0);
    let trial_col = header.iter().position(|h| h.eq_ignore_ascii_case("trial"));
    let label_col = header.iter().position(|h| h.eq_ignore_ascii_case("label"));
    let channel_cols: Vec<usize> = (0..header.len())
        .filter(|&c| Some(c) != time_col && Some(c) != trial_col && Some(c) != label_col)
        .collect();
    if channel_cols.is_empty() {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            message: "no channel columns".into(),
        });
    }
    if rows.is_empty() {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            message: "no data rows".into(),
        });
    }
    let default_id = path
        .file_stem()
        .map_or_else(|| "trial".to_string(), |s| s.to_string_lossy().into_owned());

    let mut trials: Vec<TrialRows> = Vec::new();
    for (i, rec) in rows.iter().enumerate() {
        let row = i + 1;
        let id = trial_col.map_or_else(|| default_id.clone(), |c| rec[c].to_string());
        let label = label_col
            .filter(|&c| !rec[c].is_empty())
            .map(|c| parse_label(path, row, &rec[c]))
            .transpose()?;
        let pos = match trials.iter().position(|t| t.id == id) {
            Some(p) => p,
            None => {
                trials.push(TrialRows {
                    id: id.clone(),
                    label,
                    times: Vec::new(),
                    channels: vec![Vec::new(); channel_cols.len()],
                });
                trials.len() - 1
            }
        };
        let t = &mut trials[pos];
        if t.label != label {
            return Err(Error::Csv {
                path: path.to_path_buf(),
                message: format!("row {row}: trial '{id}' changes label"),
            });
        }
        if let Some(c) = time_col {
            t.times.push(parse_cell(path, row, &header[c], &rec[c])?);
        }
        for (k, &c) in channel_cols.iter().enumerate() {
            t.channels[k].push(parse_cell(path, row, &header[c], &rec[c])?);
        }
    }

    let mut warnings = Vec::new();
    let mut records = Vec::with_capacity(trials.len());
    for t in trials {
        let fs = match sample_rate_override {
            Some(fs) => fs,
            None => infer_sample_rate(path, &t, &mut warnings)?,
        };
        let channels = channel_cols
            .iter()
            .zip(t.channels)
            .map(|(&c, samples)| Channel {
                name: header[c].clone(),
                samples,
            })
            .collect();
        records.push(SignalRecord::new(t.id, fs, channels, t.label)?);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(LoadedEeg { records, warnings })
}

fn infer_sample_rate(path: &Path, t: &TrialRows, warnings: &mut Vec<String>) -> Result<f64> {
    if t.times.is_empty() {
        return Err(Error::Config(format!(
            "{}: no time column; the sample rate must be given explicitly",
            path.display()
        )));
    }
    if t.times.len() < 2 {
        return Err(Error::Input(format!("trial {}: need at least 2 samples to infer the sample rate", t.id)));
    }
    let mut diffs: Vec<f64> = t.times.windows(2).map(|w| w[1] - w[0]).collect();
    let dt = median(&mut diffs);
    if !(dt > 0.0) {
        return Err(Error::Input(format!("trial {}: time column is not increasing", t.id)));
    }
    let worst = diffs.iter().map(|d| (d - dt).abs() / dt).fold(0.0, f64::max);
    if worst > JITTER_TOLERANCE {
        warnings.push(format!(
            "{}: trial {}: sample spacing deviates up to {:.1}% from the median {dt} s",
            path.display(),
            t.id,
            100.0 * worst
        ));
    }
    Ok(1.0 / dt)
}

/// Writes multi-trial raw EEG with `time,trial,label,<channels>` columns.
/// Every record must have the same channel names.
pub fn write_eeg_csv(path: impl AsRef<Path>, records: &[SignalRecord]) -> Result<()> {
    let path = path.as_ref();
    let Some(first) = records.first() else {
        return Err(Error::Input("no records to write".into()));
    };
    let names: Vec<&str> = first.channels().iter().map(|c| c.name.as_str()).collect();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header = vec!["time", "trial", "label"];
    header.extend(&names);
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for rec in records {
        let rec_names: Vec<&str> = rec.channels().iter().map(|c| c.name.as_str()).collect();
        if rec_names != names {
            return Err(Error::Shape(format!("trial {} has different channels", rec.trial_id())));
        }
        let label = rec.label().map(|l| l.to_string()).unwrap_or_default();
        for i in 0..rec.len() {
            let mut row = vec![
                (i as f64 / rec.sample_rate_hz()).to_string(),
                rec.trial_id().to_string(),
                label.clone(),
            ];
            row.extend(rec.channels().iter().map(|c| c.samples[i].to_string()));
            w.write_record(&row).map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Feature rows, with labels when the file has a `label` column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub features: Vec<BandPowerVector>,
    pub labels: Option<Vec<usize>>,
}

pub fn write_feature_csv(path: impl AsRef<Path>, features: &[BandPowerVector], labels: Option<&[usize]>) -> Result<()> {
    let mut out = Vec::new();
    write_feature_rows(&mut out, features, labels)?;
    std::fs::write(path, out)?;
    Ok(())
}

/// Same format as [`write_feature_csv`], into any writer.
pub fn write_feature_rows<W: Write>(out: W, features: &[BandPowerVector], labels: Option<&[usize]>) -> Result<()> {
    if let Some(l) = labels {
        if l.len() != features.len() {
            return Err(Error::Shape(format!("{} features but {} labels", features.len(), l.len())));
        }
    }
    let to_err = |e: csv::Error| Error::Csv {
        path: PathBuf::from("<features>"),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = FEATURE_COLUMNS.to_vec();
    if labels.is_some() {
        header.push("label");
    }
    w.write_record(&header).map_err(to_err)?;
    for (i, f) in features.iter().enumerate() {
        let mut row: Vec<String> = f.values().iter().map(|v| format!("{v:.16e}")).collect();
        if let Some(l) = labels {
            row.push(l[i].to_string());
        }
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_feature_csv(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let (header, rows) = read_table(path)?;
    let cols: Vec<usize> = FEATURE_COLUMNS
        .iter()
        .map(|name| {
            header.iter().position(|h| h == name).ok_or_else(|| Error::Csv {
                path: path.to_path_buf(),
                message: format!("missing column '{name}'"),
            })
        })
        .collect::<Result<_>>()?;
    let label_col = header.iter().position(|h| h == "label");
    let mut features = Vec::with_capacity(rows.len());
    let mut labels = label_col.map(|_| Vec::with_capacity(rows.len()));
    for (i, rec) in rows.iter().enumerate() {
        let row = i + 1;
        let mut v = [0.0; 4];
        for (slot, &c) in v.iter_mut().zip(&cols) {
            *slot = parse_cell(path, row, &header[c], &rec[c])?;
        }
        features.push(BandPowerVector::raw(v).map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            message: format!("row {row}: {e}"),
        })?);
        if let (Some(c), Some(l)) = (label_col, labels.as_mut()) {
            l.push(parse_label(path, row, &rec[c])?);
        }
    }
    Ok(FeatureTable { features, labels })
}
