use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use super::model::HybridModel;
use crate::dsp::StandardizerStats;
use crate::error::{Error, Result};
use crate::neural::{Activation, AdamConfig, DenseLayer, Network, NetworkSpec};
use crate::qcircuit::{AnsatzSpec, EncodingSpec, ParameterVector};

/// Version tag written into every model file.
pub const MODEL_FORMAT_VERSION: &str = "1";

/// Writes every value in scientific notation with 17 significant digits, so
/// the file is exact regardless of the reader's float formatting.
fn precise<S: Serializer>(values: &[f64], ser: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = ser.serialize_seq(Some(values.len()))?;
    for v in values {
        if !v.is_finite() {
            return Err(serde::ser::Error::custom(format!("non-finite value {v}")));
        }
        let raw = RawValue::from_string(format!("{v:.16e}")).map_err(serde::ser::Error::custom)?;
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRecord {
    activation: Activation,
    rows: usize,
    cols: usize,
    /// Row-major, `rows × cols`.
    #[serde(serialize_with = "precise")]
    weights: Vec<f64>,
    #[serde(serialize_with = "precise")]
    biases: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StandardizerRecord {
    #[serde(serialize_with = "precise")]
    mean: Vec<f64>,
    #[serde(serialize_with = "precise")]
    std_dev: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRecord {
    format_version: String,
    encoding: EncodingSpec,
    ansatz: AnsatzSpec,
    network: NetworkSpec,
    adam: AdamConfig,
    standardizer: StandardizerRecord,
    #[serde(serialize_with = "precise")]
    quantum_params: Vec<f64>,
    layers: Vec<LayerRecord>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<String>,
}

impl From<&HybridModel> for ModelRecord {
    fn from(model: &HybridModel) -> Self {
        let layers = model
            .network()
            .layers()
            .iter()
            .map(|l| LayerRecord {
                activation: l.activation,
                rows: l.weights.nrows(),
                cols: l.weights.ncols(),
                weights: l.weights.transpose().iter().copied().collect(),
                biases: l.biases.iter().copied().collect(),
            })
            .collect();
        ModelRecord {
            format_version: MODEL_FORMAT_VERSION.to_string(),
            encoding: *model.encoding(),
            ansatz: *model.ansatz(),
            network: NetworkSpec {
                input_dim: model.network().input_dim(),
                hidden: model.network().layers()[..model.network().layers().len() - 1]
                    .iter()
                    .map(DenseLayer::output_dim)
                    .collect(),
                n_classes: model.n_classes(),
            },
            adam: model.adam,
            standardizer: StandardizerRecord {
                mean: model.standardizer().mean.to_vec(),
                std_dev: model.standardizer().std_dev.to_vec(),
            },
            quantum_params: model.quantum_params().values().to_vec(),
            layers,
        }
    }
}

impl TryFrom<ModelRecord> for HybridModel {
    type Error = Error;

    fn try_from(rec: ModelRecord) -> Result<Self> {
        let dims: Vec<usize> = rec.layers.iter().map(|l| l.rows).collect();
        let expected: Vec<usize> = rec.network.hidden.iter().copied().chain([rec.network.n_classes]).collect();
        if dims != expected || rec.layers.first().map(|l| l.cols) != Some(rec.network.input_dim) {
            return Err(Error::Shape(format!(
                "layer sizes {dims:?} disagree with the declared network {:?}",
                rec.network
            )));
        }
        let (Ok(mean), Ok(std_dev)) = (
            <[f64; 4]>::try_from(rec.standardizer.mean.as_slice()),
            <[f64; 4]>::try_from(rec.standardizer.std_dev.as_slice()),
        ) else {
            return Err(Error::Shape("standardizer needs 4 means and 4 standard deviations".into()));
        };
        let mut layers = Vec::with_capacity(rec.layers.len());
        for (i, l) in rec.layers.into_iter().enumerate() {
            if l.weights.len() != l.rows * l.cols {
                return Err(Error::Shape(format!(
                    "layer {i}: {} weights for a {}x{} matrix",
                    l.weights.len(),
                    l.rows,
                    l.cols
                )));
            }
            let w = DMatrix::from_row_slice(l.rows, l.cols, &l.weights);
            layers.push(DenseLayer::new(w, DVector::from_vec(l.biases), l.activation)?);
        }
        HybridModel::new(
            rec.encoding,
            rec.ansatz,
            ParameterVector::new(rec.quantum_params)?,
            Network::new(layers)?,
            StandardizerStats { mean, std_dev },
            rec.adam,
        )
    }
}

/// Serializes a model to pretty JSON. Floats use the shortest representation
/// that parses back to the same bits.
pub fn model_to_json(model: &HybridModel) -> Result<String> {
    serde_json::to_string_pretty(&ModelRecord::from(model)).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn model_from_json(text: &str) -> Result<HybridModel> {
    let probe: VersionProbe =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("not a model file: {e}")))?;
    match probe.format_version.as_deref() {
        Some(MODEL_FORMAT_VERSION) => {}
        Some(other) => {
            return Err(Error::Version {
                found: other.to_string(),
                expected: MODEL_FORMAT_VERSION.to_string(),
            })
        }
        None => return Err(Error::Malformed("missing format_version".into())),
    }
    let rec: ModelRecord = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    HybridModel::try_from(rec)
}

pub fn save_model(model: &HybridModel, path: impl AsRef<Path>) -> Result<()> {
    let mut text = model_to_json(model)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<HybridModel> {
    model_from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::dsp::BandPowerVector;
    use crate::hybrid::hybrid_forward;
    use crate::neural::NetworkSpec;

    fn model() -> HybridModel {
        let stats = StandardizerStats {
            mean: [1.0, 2.0, 3.0, 4.0],
            std_dev: [0.5, 0.25, 1.0 / 3.0, 2.0],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        HybridModel::initialize(
            EncodingSpec::default(),
            AnsatzSpec::default(),
            &NetworkSpec::default(),
            stats,
            AdamConfig::default(),
            &mut rng,
        )
        .unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let m = model();
        let back = model_from_json(&model_to_json(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let x = BandPowerVector::raw([0.3, 2.2, 7.0, 1.1]).unwrap();
        assert_eq!(hybrid_forward(&m, &x).unwrap(), hybrid_forward(&back, &x).unwrap());
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        save_model(&model(), &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), model());
    }

    #[test]
    fn distinct_errors() {
        let text = model_to_json(&model()).unwrap();
        let future = text.replacen("\"format_version\": \"1\"", "\"format_version\": \"99\"", 1);
        assert!(matches!(model_from_json(&future), Err(Error::Version { .. })));
        assert!(matches!(model_from_json(&text[..text.len() / 2]), Err(Error::Malformed(_))));

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["layers"][0]["weights"].as_array_mut().unwrap().pop();
        assert!(matches!(model_from_json(&v.to_string()), Err(Error::Shape(_))));

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["quantum_params"].as_array_mut().unwrap().pop();
        assert!(matches!(model_from_json(&v.to_string()), Err(Error::Shape(_))));

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["network"]["hidden"][0] = 65.into();
        assert!(matches!(model_from_json(&v.to_string()), Err(Error::Shape(_))));
    }

    #[test]
    fn weights_carry_seventeen_digits() {
        let text = model_to_json(&model()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let first = v["layers"][0]["weights"][0].as_f64().unwrap();
        assert!(text.contains(&format!("{first:.16e}")));
    }
}
