use serde::{Deserialize, Serialize};

use super::features::BandPowerVector;
use crate::error::{Error, Result};

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardizerStats {
    pub mean: [f64; 4],
    pub std_dev: [f64; 4],
}

pub fn fit_standardizer(features: &[BandPowerVector]) -> Result<StandardizerStats> {
    if features.is_empty() {
        return Err(Error::Input("cannot fit a standardizer on an empty feature list".into()));
    }
    if features.iter().any(|f| f.is_standardized()) {
        return Err(Error::Logic("standardizer must be fitted on unstandardized features".into()));
    }
    let n = features.len() as f64;
    let mut mean = [0.0; 4];
    for f in features {
        for (m, v) in mean.iter_mut().zip(f.values()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0.0; 4];
    for f in features {
        for ((s, v), m) in var.iter_mut().zip(f.values()).zip(mean) {
            *s += (v - m) * (v - m);
        }
    }
    Ok(StandardizerStats {
        mean,
        std_dev: var.map(|s| (s / n).sqrt()),
    })
}

/// `(x - μ) / σ` per feature; zero-variance features map to 0.
pub fn apply_standardizer(stats: &StandardizerStats, v: &BandPowerVector) -> Result<BandPowerVector> {
    if v.is_standardized() {
        return Err(Error::Logic("feature vector is already standardized".into()));
    }
    let x = v.values();
    let mut z = [0.0; 4];
    for i in 0..4 {
        z[i] = if stats.std_dev[i] == 0.0 {
            0.0
        } else {
            (x[i] - stats.mean[i]) / stats.std_dev[i]
        };
    }
    BandPowerVector::standardized(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(v: [f64; 4]) -> BandPowerVector {
        BandPowerVector::raw(v).unwrap()
    }

    #[test]
    fn single_vector_has_zero_spread() {
        let s = fit_standardizer(&[raw([1.0, 2.0, 3.0, 4.0])]).unwrap();
        assert_eq!(s.std_dev, [0.0; 4]);
        assert_eq!(s.mean, [1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn two_symmetric_points() {
        let s = fit_standardizer(&[raw([0.0; 4]), raw([2.0; 4])]).unwrap();
        assert_eq!(s.mean, [1.0; 4]);
        assert_eq!(s.std_dev, [1.0; 4]);
    }

    #[test]
    fn empty_and_standardized_inputs_fail() {
        assert!(matches!(fit_standardizer(&[]), Err(Error::Input(_))));
        let z = BandPowerVector::standardized([0.0; 4]).unwrap();
        assert!(matches!(fit_standardizer(&[z]), Err(Error::Logic(_))));
    }

    #[test]
    fn apply_arithmetic() {
        let stats = StandardizerStats {
            mean: [1.0; 4],
            std_dev: [2.0; 4],
        };
        assert_eq!(apply_standardizer(&stats, &raw([3.0; 4])).unwrap().values(), [1.0; 4]);
        assert_eq!(apply_standardizer(&stats, &raw([1.0; 4])).unwrap().values(), [0.0; 4]);
    }

    #[test]
    fn zero_variance_feature_maps_to_zero() {
        let stats = StandardizerStats {
            mean: [5.0, 1.0, 1.0, 1.0],
            std_dev: [0.0, 1.0, 1.0, 1.0],
        };
        let z = apply_standardizer(&stats, &raw([123.0, 2.0, 2.0, 2.0])).unwrap();
        assert_eq!(z.delta(), 0.0);
        assert_eq!(z.theta(), 1.0);
    }

    #[test]
    fn double_standardization_is_a_logic_error() {
        let stats = StandardizerStats {
            mean: [0.0; 4],
            std_dev: [1.0; 4],
        };
        let z = apply_standardizer(&stats, &raw([1.0; 4])).unwrap();
        assert!(matches!(apply_standardizer(&stats, &z), Err(Error::Logic(_))));
    }
}
